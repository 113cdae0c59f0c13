"""Problem families: MED, the three-quadratic problem, the degenerate 1-D example, ZDT, DTLZ and WFG.

ZDT follows Zitzler, Deb and Thiele (2000), DTLZ follows Deb et al. (2005)
and WFG follows Huband et al. (2006). All objectives are vectorized over
leading axes.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import partial

import numpy as np

from .problem import Problem

__all__ = [
    "MedConfig", "WfgConfig", "med", "fig1_problem", "example1", "zdt", "dtlz",
    "dtlz89_witness", "wfg", "from_selector", "SelectorError",
]


# ---------------------------------------------------------------- MED

@dataclass(frozen=True)
class MedConfig:
    n: int
    m: int
    p: tuple[float, ...] | None = None
    optima: tuple[tuple[float, ...], ...] | None = None
    bound: float = 2.0

    def resolved(self) -> tuple[np.ndarray, np.ndarray]:
        p = np.ones(self.m) if self.p is None else np.asarray(self.p, dtype=float)
        if p.shape != (self.m,):
            raise ValueError(f"expected {self.m} exponents, got {p.size}")
        if np.any(~(p > 0)) or np.any(~np.isfinite(p)):
            raise ValueError("front-shape exponents must lie in (0, inf)")
        if self.optima is None:
            if self.m > self.n:
                raise ValueError(f"default optima need m <= n (got m={self.m}, n={self.n})")
            optima = np.eye(self.n)[: self.m]
        else:
            optima = np.asarray(self.optima, dtype=float)
            if optima.shape != (self.m, self.n):
                raise ValueError(f"optima must have shape ({self.m}, {self.n})")
            if self.m > 1 and np.linalg.matrix_rank(optima[1:] - optima[0]) != self.m - 1:
                raise ValueError("individual optima must be affinely independent")
        return p, optima


def _distance_power(x, center, p):
    return np.linalg.norm(x - center, axis=-1) ** p


def med(config: MedConfig) -> Problem:
    """Objectives ``f_i(x) = ||x - x_i*||**p_i`` on the box ``[-bound, bound]**n``."""
    if config.n < 1 or config.m < 0:
        raise ValueError("MED needs n >= 1 and m >= 0")
    p, optima = config.resolved()
    if np.any(np.abs(optima) > config.bound):
        raise ValueError("individual optima must lie inside the box")
    objectives = [partial(_distance_power, center=c.copy(), p=float(pi)) for c, pi in zip(optima, p)]
    pstr = ",".join(f"{v:g}" for v in p)
    return Problem(f"med:n={config.n},m={config.m},p={pstr}",
                   np.tile([-config.bound, config.bound], (config.n, 1)), objectives)


# ---------------------------------------------------------------- paper toy problems

def fig1_problem() -> Problem:
    """Two variables, three convex quadratics with vertices (0,1), (1,0), (-1,-1)."""
    return Problem(
        "fig1",
        [[-2.0, 2.0], [-2.0, 2.0]],
        [
            lambda x: x[..., 0] ** 2 + 3 * (x[..., 1] - 1) ** 2,
            lambda x: 2 * (x[..., 0] - 1) ** 2 + x[..., 1] ** 2,
            lambda x: 3 * (x[..., 0] + 1) ** 2 + 2 * (x[..., 1] + 1) ** 2,
        ],
    )


def example1() -> Problem:
    """``f1 = 0`` and ``f2 = x`` on ``[0, 1]``: the weak-Pareto pathology."""
    return Problem("example1", [[0.0, 1.0]], [lambda x: np.zeros(x.shape[:-1]), lambda x: x[..., 0]])


# ---------------------------------------------------------------- ZDT

def _zdt_g(x, ident):
    z = x[..., 1:]
    n = x.shape[-1]
    if ident == 4:
        return 1 + 10 * (n - 1) + np.sum(z ** 2 - 10 * np.cos(4 * np.pi * z), axis=-1)
    if ident == 6:
        return 1 + 9 * (np.sum(z, axis=-1) / (n - 1)) ** 0.25
    return 1 + 9 * np.sum(z, axis=-1) / (n - 1)


def _zdt_f1(x, ident):
    y1 = x[..., 0]
    if ident == 6:
        return 1 - np.exp(-4 * y1) * np.sin(6 * np.pi * y1) ** 6
    return y1.copy()


def _zdt_f2(x, ident):
    f1 = _zdt_f1(x, ident)
    g = _zdt_g(x, ident)
    r = f1 / g
    if ident in (1, 4):
        h = 1 - np.sqrt(r)
    elif ident in (2, 6):
        h = 1 - r ** 2
    else:
        h = 1 - np.sqrt(r) - r * np.sin(10 * np.pi * f1)
    return g * h


def zdt(ident: int, n: int = 30) -> Problem:
    if ident not in (1, 2, 3, 4, 6):
        raise ValueError(f"unsupported ZDT id {ident} (ZDT5 is binary-coded)")
    if n < 2:
        raise ValueError("ZDT needs n >= 2")
    bounds = np.tile([0.0, 1.0], (n, 1))
    if ident == 4:
        bounds[1:] = [-5.0, 5.0]
    return Problem(f"zdt{ident}:n={n}", bounds,
                   [partial(_zdt_f1, ident=ident), partial(_zdt_f2, ident=ident)])


# ---------------------------------------------------------------- DTLZ

def _dtlz_g(z, ident):
    if ident in (1, 3):
        return 100 * (z.shape[-1] + np.sum((z - 0.5) ** 2 - np.cos(20 * np.pi * (z - 0.5)), axis=-1))
    if ident == 6:
        return np.sum(z ** 0.1, axis=-1)
    if ident == 7:
        return 1 + 9 / z.shape[-1] * np.sum(z, axis=-1)
    return np.sum((z - 0.5) ** 2, axis=-1)


def _dtlz_angles(y, g, ident):
    """Angles (in units of pi/2 radians, as fractions) for the spherical DTLZ members."""
    if ident == 4:
        return y ** 100.0
    if ident in (5, 6):
        theta = (1 + 2 * g[..., None] * y) / (2 * (1 + g[..., None]))
        theta[..., 0] = y[..., 0]
        return theta
    return y


def _dtlz_objective(x, i, m, ident):
    """Objective ``i`` (0-based) of DTLZ``ident`` with ``m`` objectives."""
    y, z = x[..., : m - 1], x[..., m - 1:]
    g = _dtlz_g(z, ident)
    if ident == 7:
        if i < m - 1:
            return y[..., i].copy()
        h = m - np.sum(y / (1 + g[..., None]) * (1 + np.sin(3 * np.pi * y)), axis=-1)
        return (1 + g) * h
    if ident == 1:
        val = 0.5 * (1 + g) * np.prod(y[..., : m - 1 - i], axis=-1)
        if i > 0:
            val = val * (1 - y[..., m - 1 - i])
        return val
    t = _dtlz_angles(y, g, ident) * (np.pi / 2)
    val = (1 + g) * np.prod(np.cos(t[..., : m - 1 - i]), axis=-1)
    if i > 0:
        val = val * np.sin(t[..., m - 1 - i])
    return val


def dtlz(ident: int, n: int, m: int) -> Problem:
    """DTLZ1-7 with ``m - 1`` position variables and ``n - m + 1`` distance variables."""
    if ident not in range(1, 8):
        raise ValueError(f"unsupported DTLZ id {ident} (DTLZ8/9 only via dtlz89_witness)")
    if not 0 < m <= n:
        raise ValueError(f"DTLZ needs 0 < m <= n (got n={n}, m={m})")
    if m < 2:
        raise ValueError("DTLZ needs at least two objectives")
    objs = [partial(_dtlz_objective, i=i, m=m, ident=ident) for i in range(m)]
    return Problem(f"dtlz{ident}:n={n},m={m}", np.tile([0.0, 1.0], (n, 1)), objs)


def _dtlz89_f1(x, count):
    return np.sum(x[..., :count] ** 0.1, axis=-1)


def dtlz89_witness(n: int, m: int) -> Problem:
    """The single first objective of DTLZ8/9, which reads only the first ``n // m`` variables."""
    if not 0 < m <= n:
        raise ValueError(f"need 0 < m <= n (got n={n}, m={m})")
    return Problem(f"dtlz89_f1:n={n},m={m}", np.tile([0.0, 1.0], (n, 1)),
                   [partial(_dtlz89_f1, count=n // m)])


# ---------------------------------------------------------------- WFG

_EPS = 1.0e-10


def _correct_to_01(a):
    a = np.where((a < 0) & (a >= -_EPS), 0.0, a)
    return np.where((a > 1) & (a <= 1 + _EPS), 1.0, a)


def _s_linear(y, shift):
    return _correct_to_01(np.abs(y - shift) / np.abs(np.floor(shift - y) + shift))


def _s_multi_modal(y, a, b, c):
    t1 = np.abs(y - c) / (2.0 * (np.floor(c - y) + c))
    t2 = (4.0 * a + 2.0) * np.pi * (0.5 - t1)
    return _correct_to_01((1.0 + np.cos(t2) + 4.0 * b * t1 ** 2) / (b + 2.0))


def _b_flat(y, a, b, c):
    out = a + np.minimum(0, np.floor(y - b)) * (a * (b - y) / b) \
        - np.minimum(0, np.floor(c - y)) * ((1.0 - a) * (y - c) / (1.0 - c))
    return _correct_to_01(out)


def _b_poly(y, alpha):
    return _correct_to_01(y ** alpha)


def _r_sum(y, w):
    return _correct_to_01(np.sum(y * w, axis=-1) / np.sum(w))


def _r_nonsep(y, a):
    cols = y.shape[-1]
    num = np.zeros(y.shape[:-1])
    for j in range(cols):
        num = num + y[..., j]
        for k in range(a - 1):
            num = num + np.abs(y[..., j] - y[..., (1 + j + k) % cols])
    half = np.ceil(a / 2.0)
    return _correct_to_01(num / (cols * half * (1.0 + 2.0 * a - 2 * half) / a))


def _shape_convex(x, i):
    """Convex shape ``h_i`` (1-based i) on the position parameters ``x`` of shape (..., M-1)."""
    mm = x.shape[-1]
    if i == 1:
        return np.prod(1.0 - np.cos(0.5 * np.pi * x), axis=-1)
    if i <= mm:
        return np.prod(1.0 - np.cos(0.5 * np.pi * x[..., : mm - i + 1]), axis=-1) * (1.0 - np.sin(0.5 * np.pi * x[..., mm - i + 1]))
    return 1.0 - np.sin(0.5 * np.pi * x[..., 0])


def _shape_concave(x, i):
    mm = x.shape[-1]
    if i == 1:
        return np.prod(np.sin(0.5 * np.pi * x), axis=-1)
    if i <= mm:
        return np.prod(np.sin(0.5 * np.pi * x[..., : mm - i + 1]), axis=-1) * np.cos(0.5 * np.pi * x[..., mm - i + 1])
    return np.cos(0.5 * np.pi * x[..., 0])


def _shape_linear(x, i):
    mm = x.shape[-1]
    if i == 1:
        return np.prod(x, axis=-1)
    if i <= mm:
        return np.prod(x[..., : mm - i + 1], axis=-1) * (1.0 - x[..., mm - i + 1])
    return 1.0 - x[..., 0]


def _shape_mixed(x0, a=5.0, alpha=1.0):
    aux = 2.0 * a * np.pi
    return (1.0 - x0 - np.cos(aux * x0 + 0.5 * np.pi) / aux) ** alpha


@dataclass(frozen=True)
class WfgConfig:
    id: int
    k: int
    l: int
    m: int

    def validate(self):
        if self.id not in (1, 3, 4):
            raise ValueError(f"WFG{self.id} is not supported (supported: 1, 3, 4)")
        if self.m < 2:
            raise ValueError("WFG needs at least two objectives")
        if self.k < 1 or self.k % (self.m - 1):
            raise ValueError(f"k={self.k} must be a positive multiple of m-1={self.m - 1}")
        if self.l < 1:
            raise ValueError("WFG needs at least one distance-related variable")
        if self.id == 3 and self.l % 2:
            raise ValueError("WFG3 needs an even number of distance-related variables")


def _wfg_position_groups(t, k, m, w):
    gap = k // (m - 1)
    return [_r_sum(t[..., j * gap:(j + 1) * gap], w[j * gap:(j + 1) * gap]) for j in range(m - 1)]


def _wfg_transform(x, cfg: WfgConfig):
    """Map raw variables to the parameters ``(x_1..x_{M-1}, x_M)`` in ``[0,1]**M``."""
    k, l, m = cfg.k, cfg.l, cfg.m
    n = k + l
    y = x / (2.0 * np.arange(1, n + 1))
    if cfg.id == 1:
        y = y.copy()
        y[..., k:] = _s_linear(y[..., k:], 0.35)
        y[..., k:] = _b_flat(y[..., k:], 0.8, 0.75, 0.85)
        y = _b_poly(y, 0.02)
        w = 2.0 * np.arange(1, n + 1)
        t = _wfg_position_groups(y, k, m, w) + [_r_sum(y[..., k:], w[k:])]
        a = np.ones(m - 1)
    elif cfg.id == 3:
        y = y.copy()
        y[..., k:] = _s_linear(y[..., k:], 0.35)
        dist = [_r_nonsep(y[..., k + 2 * j:k + 2 * j + 2], 2) for j in range(l // 2)]
        yd = np.stack(dist, axis=-1)
        t = _wfg_position_groups(y[..., :k], k, m, np.ones(k)) + [_r_sum(yd, np.ones(yd.shape[-1]))]
        a = np.zeros(m - 1)
        a[0] = 1.0
    else:
        y = _s_multi_modal(y, 30.0, 10.0, 0.35)
        t = _wfg_position_groups(y, k, m, np.ones(n)) + [_r_sum(y[..., k:], np.ones(l))]
    if cfg.id == 4:
        a = np.ones(m - 1)
    t = np.stack(t, axis=-1)
    last = t[..., -1:]
    pos = np.maximum(last, a) * (t[..., :-1] - 0.5) + 0.5
    return np.concatenate([pos, last], axis=-1)


def _wfg_objective(x, i, cfg: WfgConfig):
    """Objective ``i`` (1-based) ``x_M + 2 i h_i``."""
    p = _wfg_transform(x, cfg)
    pos, dist = p[..., :-1], p[..., -1]
    m = cfg.m
    if cfg.id == 1:
        h = _shape_mixed(pos[..., 0]) if i == m else _shape_convex(pos, i)
    elif cfg.id == 3:
        h = _shape_linear(pos, i)
    else:
        h = _shape_concave(pos, i)
    return dist + 2.0 * i * h


def wfg(config: WfgConfig) -> Problem:
    config.validate()
    n = config.k + config.l
    bounds = np.stack([np.zeros(n), 2.0 * np.arange(1, n + 1)], axis=1)
    objs = [partial(_wfg_objective, i=i, cfg=config) for i in range(1, config.m + 1)]
    return Problem(f"wfg{config.id}:k={config.k},l={config.l},m={config.m}", bounds, objs)


def wfg_parameters(problem_config: WfgConfig, x) -> np.ndarray:
    """Transformed parameters in ``[0,1]**m`` for raw variables ``x``."""
    return _wfg_transform(np.asarray(x, dtype=float), problem_config)


# ---------------------------------------------------------------- selector grammar

class SelectorError(ValueError):
    pass


def _parse_pairs(text: str) -> dict[str, str]:
    """Split ``k=v,k=v2,v3`` where bare values continue the previous key."""
    out: dict[str, list[str]] = {}
    key = None
    for tok in filter(None, text.split(",")):
        if "=" in tok:
            key, val = tok.split("=", 1)
            key = key.strip()
            if not key:
                raise SelectorError(f"empty key in {text!r}")
            out[key] = [val.strip()]
        elif key is None:
            raise SelectorError(f"value {tok!r} without a key")
        else:
            out[key].append(tok.strip())
    return {k: ",".join(v) for k, v in out.items()}


def _int(params, key, default=None):
    if key not in params:
        if default is None:
            raise SelectorError(f"missing parameter {key!r}")
        return default
    try:
        return int(params[key])
    except ValueError:
        raise SelectorError(f"parameter {key}={params[key]!r} is not an integer") from None


def from_selector(selector: str) -> Problem:
    """Build a problem from ``name[:key=value{,key=value}]``.

    Examples: ``med:n=3,m=3,p=1,1,1``, ``zdt1:n=3``, ``dtlz2:n=7,m=3``,
    ``wfg4:k=1,l=4,m=2``, ``fig1``, ``example1``.
    """
    name, _, rest = selector.strip().partition(":")
    name = name.strip().lower()
    params = _parse_pairs(rest)
    try:
        if name == "fig1":
            return fig1_problem()
        if name == "example1":
            return example1()
        if name == "med":
            n = _int(params, "n")
            m = _int(params, "m", n)
            p = tuple(float(v) for v in params["p"].split(",")) if "p" in params else None
            return med(MedConfig(n, m, p))
        if name.startswith("zdt"):
            return zdt(int(name[3:]), _int(params, "n", 30))
        if name == "dtlz89":
            return dtlz89_witness(_int(params, "n"), _int(params, "m"))
        if name.startswith("dtlz"):
            m = _int(params, "m", 3)
            return dtlz(int(name[4:]), _int(params, "n", m + 4), m)
        if name.startswith("wfg"):
            m = _int(params, "m", 2)
            return wfg(WfgConfig(int(name[3:]), _int(params, "k", m - 1), _int(params, "l", 4), m))
    except SelectorError:
        raise
    except ValueError as exc:
        raise SelectorError(f"{selector!r}: {exc}") from None
    raise SelectorError(f"unknown problem {name!r}")
