"""
20 种腐蚀的函数实现

每个函数签名为 fn(x, params, rng) -> ndarray：
    x       [0, 1] 浮点数组，形状 (H, W, C)。可见光 C=3；红外以单通道 C=1 传入，
            噪声、霜、泼溅等因此天然以灰度方式叠加
    params  参数表中该等级的一项
    rng     该图像独立的 Rng

噪声、模糊、天气、数字类的实现沿用 ImageNet-C 的做法，改写为 numpy / scipy / Pillow。
"""

import io
import math
from typing import Any, Callable, Dict

import numpy as np
from matplotlib.colors import hsv_to_rgb, rgb_to_hsv
from PIL import Image
from scipy import ndimage

from ..imaging.ops import luminance, to_uint8
from ..imaging.rng import Rng
from ..models import CorruptionKind

CorruptionFn = Callable[[np.ndarray, Any, Rng], np.ndarray]

FROST_TINT = np.array([0.82, 0.89, 1.0])
WATER_COLOR = np.array([175, 238, 238]) / 255.0
MUD_COLOR = np.array([63, 42, 20]) / 255.0


# ---------------------------------------------------------------- 辅助函数

def _per_channel(x: np.ndarray, fn: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    return np.stack([fn(x[:, :, c]) for c in range(x.shape[2])], axis=-1)


def _tint(color: np.ndarray, channels: int) -> np.ndarray:
    """单通道图像上颜色退化为其亮度"""
    if channels == 1:
        return np.array([float(color @ np.array([0.299, 0.587, 0.114]))])
    return color


def _disk(radius: float, alias_blur: float) -> np.ndarray:
    """抗锯齿圆盘卷积核"""
    half = 8 if radius <= 8 else int(math.ceil(radius))
    grid = np.arange(-half, half + 1)
    xx, yy = np.meshgrid(grid, grid)
    kernel = ((xx ** 2 + yy ** 2) <= radius ** 2).astype(np.float64)
    kernel /= kernel.sum()
    kernel = ndimage.gaussian_filter(kernel, sigma=alias_blur, mode="constant")
    return kernel / kernel.sum()


def _motion_kernel(radius: int, sigma: float, angle: float) -> np.ndarray:
    """沿 angle 方向的一维高斯运动核"""
    size = 2 * radius + 1
    offsets = np.arange(size) - radius
    line = np.exp(-(offsets ** 2) / (2.0 * sigma ** 2))
    kernel = np.zeros((size, size))
    kernel[:, radius] = line / line.sum()
    kernel = ndimage.rotate(kernel, angle, reshape=False, order=1)
    total = kernel.sum()
    return kernel / total if total > 0 else kernel


def _motion(x: np.ndarray, radius: int, sigma: float, angle: float) -> np.ndarray:
    kernel = _motion_kernel(int(radius), sigma, angle)
    return _per_channel(x, lambda ch: ndimage.correlate(ch, kernel, mode="mirror"))


def plasma_fractal(mapsize: int, wibbledecay: float, rng: Rng) -> np.ndarray:
    """
    菱形-方形算法生成的分形高度图

    Args:
        mapsize: 边长，必须是 2 的幂
        wibbledecay: 扰动衰减
        rng: 随机数发生器

    Returns:
        mapsize × mapsize，取值 [0, 1]
    """
    assert mapsize & (mapsize - 1) == 0
    maparray = np.zeros((mapsize, mapsize), dtype=np.float64)
    stepsize = mapsize
    wibble = 100.0

    def wibbledmean(array):
        return array / 4 + wibble * rng.uniform_array(-wibble, wibble, array.shape)

    while stepsize >= 2:
        half = stepsize // 2
        # 方形步
        corners = maparray[0:mapsize:stepsize, 0:mapsize:stepsize]
        square = corners + np.roll(corners, shift=-1, axis=0)
        square += np.roll(square, shift=-1, axis=1)
        maparray[half:mapsize:stepsize, half:mapsize:stepsize] = wibbledmean(square)
        # 菱形步
        dr = maparray[half:mapsize:stepsize, half:mapsize:stepsize]
        ul = maparray[0:mapsize:stepsize, 0:mapsize:stepsize]
        lt = dr + np.roll(dr, 1, axis=0) + ul + np.roll(ul, -1, axis=1)
        maparray[0:mapsize:stepsize, half:mapsize:stepsize] = wibbledmean(lt)
        tt = dr + np.roll(dr, 1, axis=1) + ul + np.roll(ul, -1, axis=0)
        maparray[half:mapsize:stepsize, 0:mapsize:stepsize] = wibbledmean(tt)
        stepsize //= 2
        wibble /= wibbledecay

    maparray -= maparray.min()
    peak = maparray.max()
    return maparray / peak if peak > 0 else maparray


def _plasma_for(h: int, w: int, wibbledecay: float, rng: Rng) -> np.ndarray:
    mapsize = 1 << (max(h, w) - 1).bit_length()
    return plasma_fractal(max(mapsize, 2), wibbledecay, rng)[:h, :w]


def clipped_zoom(x: np.ndarray, factor: float) -> np.ndarray:
    """以中心为基准放大后裁回原尺寸"""
    h, w = x.shape[:2]
    ch = int(math.ceil(h / factor))
    cw = int(math.ceil(w / factor))
    top = (h - ch) // 2
    left = (w - cw) // 2
    zoomed = ndimage.zoom(x[top:top + ch, left:left + cw], (factor, factor, 1), order=1)
    trim_top = (zoomed.shape[0] - h) // 2
    trim_left = (zoomed.shape[1] - w) // 2
    return zoomed[trim_top:trim_top + h, trim_left:trim_left + w]


def _as_uint8(x: np.ndarray) -> np.ndarray:
    return to_uint8(x * 255.0)


def _to_pil(x: np.ndarray) -> Image.Image:
    px = _as_uint8(x)
    if px.shape[2] == 1:
        return Image.fromarray(np.ascontiguousarray(px[:, :, 0]))
    return Image.fromarray(np.ascontiguousarray(px))


def _from_pil(image: Image.Image, channels: int) -> np.ndarray:
    arr = np.asarray(image, dtype=np.float64) / 255.0
    if arr.ndim == 2:
        arr = arr[:, :, None]
    return arr[:, :, :channels]


# ---------------------------------------------------------------- 噪声

def gaussian_noise(x: np.ndarray, c: float, rng: Rng) -> np.ndarray:
    return np.clip(x + rng.normal(0.0, c, size=x.shape), 0, 1)


def shot_noise(x: np.ndarray, c: float, rng: Rng) -> np.ndarray:
    return np.clip(rng.poisson(x * c) / float(c), 0, 1)


def impulse_noise(x: np.ndarray, amount: float, rng: Rng) -> np.ndarray:
    """椒盐噪声：amount 比例的元素被置为 0 或 1"""
    out = x.copy()
    hit = rng.uniform_array(0.0, 1.0, x.shape) < amount
    salt = rng.uniform_array(0.0, 1.0, x.shape) < 0.5
    out[hit] = salt[hit].astype(np.float64)
    return out


def speckle_noise(x: np.ndarray, c: float, rng: Rng) -> np.ndarray:
    return np.clip(x + x * rng.normal(0.0, c, size=x.shape), 0, 1)


# ---------------------------------------------------------------- 模糊

def defocus_blur(x: np.ndarray, params, rng: Rng) -> np.ndarray:
    radius, alias_blur = params
    kernel = _disk(radius, alias_blur)
    return np.clip(_per_channel(x, lambda ch: ndimage.correlate(ch, kernel, mode="mirror")), 0, 1)


def glass_blur(x: np.ndarray, params, rng: Rng) -> np.ndarray:
    sigma, max_delta, iterations = params
    max_delta = int(max_delta)
    h, w = x.shape[:2]
    px = _as_uint8(ndimage.gaussian_filter(x, sigma=(sigma, sigma, 0), mode="nearest"))

    # 局部像素交换
    rows = np.arange(h - max_delta, max_delta, -1)
    cols = np.arange(w - max_delta, max_delta, -1)
    if rows.size and cols.size:
        for _ in range(int(iterations)):
            hh, ww = np.meshgrid(rows, cols, indexing="ij")
            dy = rng.generator.integers(-max_delta, max_delta, size=hh.shape)
            dx = rng.generator.integers(-max_delta, max_delta, size=hh.shape)
            hp, wp = hh + dy, ww + dx
            src = px[hh, ww].copy()
            dst = px[hp, wp].copy()
            px[hh, ww] = dst
            px[hp, wp] = src

    out = ndimage.gaussian_filter(px / 255.0, sigma=(sigma, sigma, 0), mode="nearest")
    return np.clip(out, 0, 1)


def motion_blur(x: np.ndarray, params, rng: Rng) -> np.ndarray:
    radius, sigma = params
    angle = rng.uniform(-45.0, 45.0)
    return np.clip(_motion(x, radius, sigma, angle), 0, 1)


def zoom_blur(x: np.ndarray, params, rng: Rng) -> np.ndarray:
    max_zoom, step = params
    factors = np.arange(1.0, max_zoom, step)
    out = np.zeros_like(x)
    for factor in factors:
        out += clipped_zoom(x, float(factor))
    return np.clip((x + out) / (len(factors) + 1), 0, 1)


def gaussian_blur(x: np.ndarray, sigma: float, rng: Rng) -> np.ndarray:
    return np.clip(ndimage.gaussian_filter(x, sigma=(sigma, sigma, 0), mode="nearest"), 0, 1)


# ---------------------------------------------------------------- 天气

def snow(x: np.ndarray, params, rng: Rng) -> np.ndarray:
    loc, scale, zoom, threshold, radius, sigma, keep = params
    h, w, channels = x.shape
    layer = rng.normal(loc, scale, size=(h, w))[:, :, None]
    layer = clipped_zoom(layer, zoom)
    layer[layer < threshold] = 0
    layer = np.clip(layer, 0, 1)
    angle = rng.uniform(-135.0, -45.0)
    layer = _motion(layer, int(radius), sigma, angle)

    gray = x if channels == 1 else luminance(x)[:, :, None]
    x = keep * x + (1 - keep) * np.maximum(x, gray * 1.5 + 0.5)
    return np.clip(x + layer + np.rot90(layer, k=2), 0, 1)


def frost(x: np.ndarray, params, rng: Rng) -> np.ndarray:
    """程序化霜层：低频分形云 + 高频冰晶纹理，带淡蓝色调"""
    keep, strength = params
    h, w, channels = x.shape
    cloud = _plasma_for(h, w, 1.6, rng)
    crystals = ndimage.gaussian_filter(rng.uniform_array(0.0, 1.0, (h, w)), 0.8)
    crystals -= crystals.min()
    peak = crystals.max()
    if peak > 0:
        crystals /= peak
    ice = np.clip(0.6 * cloud + 0.4 * crystals, 0, 1) ** 1.5
    layer = ice[:, :, None] * _tint(FROST_TINT, channels)
    return np.clip(keep * x + strength * layer, 0, 1)


def fog(x: np.ndarray, params, rng: Rng) -> np.ndarray:
    density, wibbledecay = params
    h, w = x.shape[:2]
    max_val = x.max()
    x = x + density * _plasma_for(h, w, wibbledecay, rng)[:, :, None]
    return np.clip(x * max_val / (max_val + density), 0, 1)


def rain(x: np.ndarray, params, rng: Rng) -> np.ndarray:
    """运动模糊后的线状雨痕，对所有通道等量叠加"""
    density, half_length, alpha, darken = params
    h, w = x.shape[:2]
    drops = max(1, int(round(density * h * w)))
    layer = np.zeros((h, w, 1))
    rows = rng.generator.integers(0, h, size=drops)
    cols = rng.generator.integers(0, w, size=drops)
    layer[rows, cols, 0] = 1.0
    angle = rng.uniform(-20.0, 20.0)
    layer = _motion(layer, int(half_length), float(half_length), angle)
    peak = layer.max()
    if peak > 0:
        layer /= peak
    return np.clip(x * darken + alpha * layer, 0, 1)


def spatter(x: np.ndarray, params, rng: Rng) -> np.ndarray:
    loc, scale, sigma, threshold, intensity, mud = params
    h, w, channels = x.shape
    liquid = ndimage.gaussian_filter(rng.normal(loc, scale, size=(h, w)), sigma)
    liquid[liquid < threshold] = 0

    if int(mud) == 0:
        lq = _as_uint8(liquid).astype(np.float64)
        edges = np.hypot(ndimage.sobel(lq, axis=0), ndimage.sobel(lq, axis=1)) > 50
        dist = np.minimum(ndimage.distance_transform_edt(~edges), 20.0)
        dist = ndimage.uniform_filter(dist, size=3).astype(np.uint8)
        # 直方图均衡
        counts = np.cumsum(np.bincount(dist.ravel(), minlength=256))
        cdf_min = counts[counts > 0][0]
        total = counts[-1]
        if total > cdf_min:
            lut = np.floor((counts - cdf_min) / (total - cdf_min) * 255.0)
        else:
            lut = np.zeros(256)
        dist = np.clip(lut[dist], 0, 255)
        emboss = np.array([[-2, -1, 0], [-1, 1, 1], [0, 1, 2]], dtype=np.float64)
        dist = np.clip(ndimage.correlate(dist, emboss, mode="mirror"), 0, 255)
        dist = ndimage.uniform_filter(dist, size=3)

        m = liquid * dist
        peak = m.max()
        if peak > 0:
            m /= peak
        m *= intensity
        return np.clip(x + m[:, :, None] * _tint(WATER_COLOR, channels), 0, 1)

    m = ndimage.gaussian_filter((liquid > threshold).astype(np.float64), intensity)
    m[m < 0.8] = 0
    m = m[:, :, None]
    return np.clip(x * (1 - m) + _tint(MUD_COLOR, channels) * m, 0, 1)


# ---------------------------------------------------------------- 数字 / 光度

def brightness(x: np.ndarray, c: float, rng: Rng) -> np.ndarray:
    """HSV 明度加 c；单通道图像的明度即其自身"""
    if x.shape[2] == 1:
        return np.clip(x + c, 0, 1)
    hsv = rgb_to_hsv(x)
    hsv[:, :, 2] = np.clip(hsv[:, :, 2] + c, 0, 1)
    return np.clip(hsv_to_rgb(hsv), 0, 1)


def contrast(x: np.ndarray, c: float, rng: Rng) -> np.ndarray:
    means = np.mean(x, axis=(0, 1), keepdims=True)
    return np.clip((x - means) * c + means, 0, 1)


def saturate(x: np.ndarray, params, rng: Rng) -> np.ndarray:
    scale, shift = params
    hsv = rgb_to_hsv(x)
    hsv[:, :, 1] = np.clip(hsv[:, :, 1] * scale + shift, 0, 1)
    return np.clip(hsv_to_rgb(hsv), 0, 1)


def elastic_transform(x: np.ndarray, params, rng: Rng) -> np.ndarray:
    """随机仿射 + 平滑位移场，参数以短边长度为单位"""
    h, w = x.shape[:2]
    ref = min(h, w)
    alpha, sigma, affine = (p * ref for p in params)

    # 仿射：三个控制点随机扰动
    center = np.array([h, w], dtype=np.float64) // 2
    square = ref // 3
    pts1 = np.array([
        center + square,
        [center[0] + square, center[1] - square],
        center - square,
    ])
    pts2 = pts1 + rng.uniform_array(-affine, affine, pts1.shape)
    if square > 0:
        solution = np.linalg.solve(np.hstack([pts1, np.ones((3, 1))]), pts2)
        forward, shift = solution[:2].T, solution[2]
        inverse = np.linalg.inv(forward)
        offset = -inverse @ shift
        x = _per_channel(x, lambda ch: ndimage.affine_transform(
            ch, inverse, offset=offset, order=1, mode="mirror"))

    dx = ndimage.gaussian_filter(rng.uniform_array(-1.0, 1.0, (h, w)), sigma, mode="reflect", truncate=3) * alpha
    dy = ndimage.gaussian_filter(rng.uniform_array(-1.0, 1.0, (h, w)), sigma, mode="reflect", truncate=3) * alpha
    yy, xx = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    coords = np.array([yy + dy, xx + dx])
    out = _per_channel(x, lambda ch: ndimage.map_coordinates(ch, coords, order=1, mode="reflect"))
    return np.clip(out, 0, 1)


def pixelate(x: np.ndarray, c: float, rng: Rng) -> np.ndarray:
    h, w, channels = x.shape
    small = (max(1, int(w * c)), max(1, int(h * c)))
    image = _to_pil(x).resize(small, Image.BOX).resize((w, h), Image.BOX)
    return _from_pil(image, channels)


def jpeg_compression(x: np.ndarray, quality: int, rng: Rng) -> np.ndarray:
    buffer = io.BytesIO()
    _to_pil(x).save(buffer, format="JPEG", quality=int(quality))
    buffer.seek(0)
    with Image.open(buffer) as image:
        image.load()
        return _from_pil(image, x.shape[2])


CORRUPTION_FUNCTIONS: Dict[CorruptionKind, CorruptionFn] = {
    CorruptionKind.GAUSSIAN_NOISE: gaussian_noise,
    CorruptionKind.SHOT_NOISE: shot_noise,
    CorruptionKind.IMPULSE_NOISE: impulse_noise,
    CorruptionKind.SPECKLE_NOISE: speckle_noise,
    CorruptionKind.DEFOCUS_BLUR: defocus_blur,
    CorruptionKind.GLASS_BLUR: glass_blur,
    CorruptionKind.MOTION_BLUR: motion_blur,
    CorruptionKind.ZOOM_BLUR: zoom_blur,
    CorruptionKind.GAUSSIAN_BLUR: gaussian_blur,
    CorruptionKind.SNOW: snow,
    CorruptionKind.FROST: frost,
    CorruptionKind.FOG: fog,
    CorruptionKind.RAIN: rain,
    CorruptionKind.SPATTER: spatter,
    CorruptionKind.BRIGHTNESS: brightness,
    CorruptionKind.CONTRAST: contrast,
    CorruptionKind.ELASTIC_TRANSFORM: elastic_transform,
    CorruptionKind.PIXELATE: pixelate,
    CorruptionKind.JPEG_COMPRESSION: jpeg_compression,
    CorruptionKind.SATURATE: saturate,
}
