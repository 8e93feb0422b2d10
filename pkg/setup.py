# -*- coding: utf-8 -*-
"""vireid-bench 安装配置"""

import sys
from setuptools import setup, find_packages

# 设置标准输出编码为 utf-8（Windows 兼容）
if sys.platform == "win32":
    import io
    sys.stdout = io.TextIOWrapper(sys.stdout.buffer, encoding="utf-8")
    sys.stderr = io.TextIOWrapper(sys.stderr.buffer, encoding="utf-8")


def read_file(filepath, default=""):
    """安全读取文件"""
    try:
        with open(filepath, "r", encoding="utf-8") as f:
            return f.read()
    except (UnicodeDecodeError, OSError):
        return default


def read_requirements(filepath="requirements.txt"):
    """读取依赖，跳过注释和测试依赖"""
    lines = read_file(filepath).splitlines()
    return [
        line.strip()
        for line in lines
        if line.strip() and not line.startswith("#") and not line.startswith("pytest")
    ]


setup(
    name="vireid-bench",
    version="0.1.0",
    description="可见光-红外行人重识别的腐蚀基准、多模态数据增强与 LOOQ 评估工具",
    long_description=read_file("README.md", "vireid-bench"),
    long_description_content_type="text/markdown",
    packages=find_packages(include=["src", "src.*"]),
    py_modules=["main"],
    include_package_data=True,
    data_files=[("config", ["config/defaults.yaml", "config/corruption_severity.yaml"])],
    python_requires=">=3.9",
    install_requires=read_requirements(),
    extras_require={"test": ["pytest>=7.4.0"]},
    entry_points={
        "console_scripts": [
            "vireid-bench=main:cli",
        ],
    },
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
        "Topic :: Scientific/Engineering :: Image Recognition",
    ],
    keywords="person re-identification infrared corruption benchmark data augmentation",
    license="MIT",
)
