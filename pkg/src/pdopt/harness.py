"""Experiment configuration, problem generators, runs and sweeps.

A config is one JSON object::

    {"mode": "solve", "seed": 7,
     "problem": {...}, "params": {"gamma": 1.0, "lam": 1.0},
     "output": {"trace": "trace.csv", "report": "report.json"}}

``mode`` is ``solve``, ``consensus``, ``probe`` or ``certify``. Relative file
paths are resolved against the config file's directory. All randomness flows
from ``seed`` (overridden by the ``PDOPT_SEED`` environment variable).
"""

from __future__ import annotations

import json
import math
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import consensus as cons
from . import linalg
from .operators import (LinearOperator, box_indicator, l1_prox, prox_from_config,
                        quadratic_oracle, smooth_from_config, squared_norm_prox,
                        zero_indicator, zero_oracle, zero_prox)
from .pdsolver import (InfeasibleParameters, NumericalDivergence, PdParams, ProblemSpec,
                       certify, initial_state, solve)
from .rng import Xoshiro256

MODES = ("solve", "consensus", "probe", "certify")
EXIT_CODES = {"converged": 0, "feasible": 0, "max_iters": 2, "diverged": 3, "infeasible": 4}
EXIT_USAGE = 1
TRACE_COLUMNS = ("k", "residual", "lyapunov", "objective", "dist_to_opt")
CONSENSUS_COLUMNS = TRACE_COLUMNS + ("consensus_violation",)


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field or line."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field


@dataclass
class ExperimentConfig:
    mode: str
    problem: dict
    params: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    seed: int = 0
    base_dir: Path = field(default_factory=Path.cwd)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"must be one of {', '.join(MODES)}, got {self.mode!r}", "mode")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or self.seed < 0:
            raise ConfigError("must be an unsigned integer", "seed")
        for name in ("problem", "params", "output"):
            if not isinstance(getattr(self, name), dict):
                raise ConfigError("must be an object", name)

    def path(self, value) -> Path:
        p = Path(value)
        return p if p.is_absolute() else self.base_dir / p

    @classmethod
    def from_dict(cls, data, base_dir=None) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("top level must be an object")
        unknown = set(data) - {"mode", "problem", "params", "output", "seed"}
        if unknown:
            raise ConfigError(f"unknown key(s) {sorted(unknown)}")
        if "mode" not in data:
            raise ConfigError("missing required field", "mode")
        return cls(
            data["mode"], data.get("problem", {}), data.get("params", {}),
            data.get("output", {}), data.get("seed", 0),
            Path(base_dir) if base_dir is not None else Path.cwd(),
        )


def parse_config(text: str, base_dir=None) -> ExperimentConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    cfg = ExperimentConfig.from_dict(data, base_dir)
    env = os.environ.get("PDOPT_SEED")
    if env is not None:
        try:
            cfg.seed = int(env)
        except ValueError:
            raise ConfigError(f"not an unsigned integer: {env!r}", "PDOPT_SEED") from None
        if cfg.seed < 0:
            raise ConfigError("must be an unsigned integer", "PDOPT_SEED")
    return cfg


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    return parse_config(text, path.parent)


# -- field helpers ---------------------------------------------------------

def _number(block: dict, key: str, where: str, default=None, positive=True, integer=False):
    name = f"{where}.{key}"
    if key not in block:
        if default is None:
            raise ConfigError("missing required field", name)
        return default
    value = block[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"must be a number, got {value!r}", name)
    if integer and not float(value).is_integer():
        raise ConfigError("must be an integer", name)
    if positive and not value > 0:
        raise ConfigError("must be positive", name)
    return int(value) if integer else float(value)


def _matrix(cfg: ExperimentConfig, value, where: str, dim=None) -> np.ndarray:
    if value == "identity":
        if dim is None:
            raise ConfigError("identity needs a known dimension", where)
        return np.eye(dim)
    if isinstance(value, str):
        path = cfg.path(value)
        if not path.exists():
            raise ConfigError(f"file not found: {path}", where)
        try:
            return linalg.read_matrix(path)
        except linalg.LinalgError as exc:
            raise ConfigError(str(exc), where) from None
    try:
        return linalg.as_matrix(value)
    except (linalg.LinalgError, ValueError, TypeError) as exc:
        raise ConfigError(f"not a matrix: {exc}", where) from None


# -- problem generators ----------------------------------------------------

FAMILIES = ("lasso", "least-squares", "papc", "random", "consensus-quadratic",
            "consensus-lasso")


def _dims(size: dict, *keys, default=None) -> list[int]:
    out = []
    for key in keys:
        value = size.get(key, default)
        if value is None:
            raise ValueError(f"size parameter {key!r} is required")
        if isinstance(value, bool) or not isinstance(value, int) or value < 1:
            raise ValueError(f"size parameter {key!r} must be a positive integer, got {value!r}")
        out.append(value)
    return out


def _graph_from(size: dict, rng: Xoshiro256) -> tuple[cons.Graph, np.ndarray]:
    kind = size.get("graph", "ring")
    if kind == "swap":
        return cons.path_graph(2), cons.SWAP_W.copy()
    (n,) = _dims(size, "n")
    makers = {"ring": cons.ring_graph, "path": cons.path_graph,
              "complete": cons.complete_graph, "star": cons.star_graph}
    if kind in makers:
        g = makers[kind](n)
    elif kind == "random":
        g = cons.random_connected_graph(n, rng, size.get("edge_prob", 0.3))
    else:
        raise ValueError(f"unknown graph family {kind!r}")
    return g, cons.metropolis_weights(g)


def generate_problem(family: str, size: dict | None = None, seed: int = 0):
    """Deterministic random instance of a named family.

    Families ``lasso``, ``least-squares``, ``papc`` and ``random`` return a
    ``ProblemSpec``; ``consensus-quadratic`` and ``consensus-lasso`` return a
    ``ConsensusProblem``. Lipschitz and strong-convexity constants are computed
    from the generated data.
    """
    size = dict(size or {})
    rng = Xoshiro256(seed)
    if family == "lasso":
        n, m = _dims(size, "n", "m", default=size.get("n"))
        weight = size.get("weight", 0.1)
        if size.get("K") == "identity":
            K = np.eye(n)
            y = rng.normal_array(n)
        else:
            K = rng.normal_array(m, n) / math.sqrt(m)
            y = rng.normal_array(m)
        return ProblemSpec(quadratic_oracle(K, y), l1_prox(n, weight), zero_oracle(n),
                           LinearOperator(np.eye(n)))
    if family == "least-squares":
        n, m = _dims(size, "n", "m", default=size.get("n"))
        K = np.eye(n) + 0.3 * rng.normal_array(n, n) / math.sqrt(n)
        y = rng.normal_array(n)
        A = rng.normal_array(m, n) / math.sqrt(n)
        return ProblemSpec(quadratic_oracle(K, y), zero_prox(m), zero_oracle(m), LinearOperator(A))
    if family == "papc":
        n, m = _dims(size, "n", "m", default=size.get("n"))
        K = np.eye(n) + 0.2 * rng.normal_array(n, n) / math.sqrt(n)
        y = rng.normal_array(n)
        A = rng.normal_array(m, n) / math.sqrt(n)
        h = box_indicator(m, -0.5, 0.5) if size.get("h") == "box" else l1_prox(m, 0.5)
        return ProblemSpec(quadratic_oracle(K, y), h, zero_oracle(m), LinearOperator(A))
    if family == "random":
        return random_instance(rng, **size)[0]
    if family in ("consensus-quadratic", "consensus-lasso"):
        (p,) = _dims(size, "p", default=1)
        g, W = _graph_from(size, rng)
        n = W.shape[0]
        if family == "consensus-quadratic":
            Y = rng.normal_array(n, p)
            return cons.quadratic_problem(W, Y, g)
        smooth = []
        for _ in range(n):
            B = np.eye(p) + 0.3 * rng.normal_array(p, p) / math.sqrt(p)
            smooth.append(quadratic_oracle(B, rng.normal_array(p)))
        weight = size.get("weight", 0.1)
        return cons.ConsensusProblem(W, tuple(smooth), tuple(l1_prox(p, weight) for _ in range(n)), g)
    raise ValueError(f"unknown problem family {family!r}")


def random_instance(rng: Xoshiro256, n: int | None = None, m: int | None = None,
                    h: str | None = None, lstar: str | None = None,
                    strongly_convex: bool = False, max_dim: int = 20):
    """A random feasible instance with a planted saddle point.

    Returns ``(spec, params, (x*, s*))`` with ``P = D = I``. ``f`` is a
    quadratic (rank deficient unless ``strongly_convex``), ``h`` is ``l1``,
    ``box`` or ``sq`` and ``l*`` is zero or quadratic. The data are built
    backwards from ``(x*, s*)`` so that ``-A^T s* = grad f(x*)`` and
    ``s*`` lies in ``dh(A x* - grad l*(s*))`` hold exactly. ``gamma`` and
    ``lam`` are drawn until the certificate passes.
    """
    n = n or 1 + rng.integer(max_dim)
    m = m or 1 + rng.integer(max_dim)
    h = h or ("l1", "box")[rng.integer(2)]
    lstar = lstar or ("zero", "quadratic")[rng.integer(2)]
    A = rng.normal_array(m, n) / math.sqrt(n)
    x_star = rng.normal_array(n)

    if lstar == "zero":
        Kl = None
        q = A @ x_star
    elif lstar == "quadratic":
        Kl = 0.3 * rng.normal_array(m, m) / math.sqrt(m)
        if strongly_convex:
            Kl = Kl + 0.5 * np.eye(m)
        q = rng.normal_array(m)
    else:
        raise ValueError(f"unknown l* kind {lstar!r}")

    # h and a subgradient s* of h at q
    if h == "l1":
        w = rng.uniform(0.1, 1.0)
        if Kl is not None:
            q = np.where(rng.uniform_array(m) < 0.3, 0.0, q)
        s_star = np.where(q != 0, w * np.sign(q), rng.uniform_array(m, low=-w, high=w))
        hp = l1_prox(m, w)
    elif h == "box":
        lo, hi, s_star = np.empty(m), np.empty(m), np.empty(m)
        for i in range(m):
            side = rng.integer(3)
            width = rng.uniform(0.1, 1.0)
            if side == 0:
                lo[i], hi[i], s_star[i] = q[i] - width, q[i], rng.uniform(0.0, 1.0)
            elif side == 1:
                lo[i], hi[i], s_star[i] = q[i], q[i] + width, -rng.uniform(0.0, 1.0)
            else:
                lo[i], hi[i], s_star[i] = q[i] - width, q[i] + width, 0.0
        hp = box_indicator(m, lo, hi)
    elif h == "sq":
        c = rng.uniform(0.5, 2.0)
        s_star = c * q
        hp = squared_norm_prox(m, c)
    else:
        raise ValueError(f"unknown h kind {h!r}")

    if Kl is None:
        lo_oracle = zero_oracle(m)
    else:
        # grad l*(s*) = Kl^T (Kl s* - yl) must equal A x* - q
        v = np.linalg.solve(Kl.T, A @ x_star - q)
        lo_oracle = quadratic_oracle(Kl, Kl @ s_star - v)

    # grad f(x*) = K^T (K x* - y) must equal -A^T s*
    g = -(A.T @ s_star)
    if strongly_convex:
        K = np.eye(n) + 0.3 * rng.normal_array(n, n) / math.sqrt(n)
        z = np.linalg.solve(K.T, g)
    else:
        K0 = rng.normal_array(rng.integer(n), n) / math.sqrt(n)
        gn = float(np.linalg.norm(g))
        u = g / gn if gn > 0 else rng.normal_array(n) / math.sqrt(n)
        K = np.vstack([K0, u.reshape(1, -1)])
        z = np.zeros(K.shape[0])
        z[-1] = gn
    f = quadratic_oracle(K, K @ x_star - z)

    spec = ProblemSpec(f, hp, lo_oracle, LinearOperator(A))
    lmax = max(linalg.eig_max(A @ A.T), 1e-12)
    L_f = max(f.lipschitz, 1e-12)
    for _ in range(200):
        lam = rng.uniform(0.05, 1.3) / lmax
        t = lam * lmax
        theta = 1.0 if t <= 1.0 - 1e-9 else 0.5 * (0.75 + 1.0 / t)
        # l* needs gamma > lam L_l / (2 lmin(I - theta lam A A^T)); f needs gamma < 2 / L_f
        floor = lam * lo_oracle.lipschitz / (2.0 * (1.0 - theta * t))
        if 1.2 * floor >= 1.9 / L_f:
            continue
        gamma = rng.uniform(max(0.05, 1.2 * floor * L_f), 1.9) / L_f
        try:
            certify(spec, gamma, lam)
        except InfeasibleParameters:
            continue
        return spec, PdParams(gamma, lam), (x_star, s_star)
    raise RuntimeError("could not draw feasible parameters")


# -- runs ------------------------------------------------------------------

@dataclass
class RunReport:
    mode: str
    status: str
    iterations: int = 0
    final_residual: float | None = None
    certificate: dict = field(default_factory=dict)
    wall_time: float = 0.0
    details: dict = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    def to_dict(self) -> dict:
        return {"mode": self.mode, "status": self.status, "iterations": self.iterations,
                "final_residual": self.final_residual, "certificate": self.certificate,
                "wall_time": self.wall_time, "details": self.details}


def format_number(x) -> str:
    """Shortest round-trip decimal; empty for ``None``."""
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return repr(float(x))


def format_csv(columns, rows) -> str:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(format_number(getattr(row, c) if not isinstance(row, dict) else row[c])
                              for c in columns))
    return "\n".join(lines) + "\n"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def build_spec(cfg: ExperimentConfig) -> ProblemSpec:
    block = cfg.problem
    if "family" in block:
        try:
            spec = generate_problem(block["family"], block.get("size", {}), cfg.seed)
        except ValueError as exc:
            raise ConfigError(str(exc), "problem.family") from None
        if not isinstance(spec, ProblemSpec):
            raise ConfigError("a consensus family needs mode 'consensus'", "problem.family")
        return spec
    if "A" not in block:
        raise ConfigError("missing required field", "problem.A")
    dim = block.get("dim")
    A = _matrix(cfg, block["A"], "problem.A", dim)
    n = A.shape[1]
    m = A.shape[0]
    try:
        f = smooth_from_config(block.get("f", {"name": "zero"}), n)
        lstar = smooth_from_config(block.get("lstar", {"name": "zero"}), m)
    except (ValueError, KeyError, linalg.LinalgError) as exc:
        raise ConfigError(f"bad smooth function: {exc}", "problem.f") from None
    try:
        h = prox_from_config(block.get("h", {"name": "zero"}), m)
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"bad prox function: {exc}", "problem.h") from None
    P = _matrix(cfg, block["P"], "problem.P", n) if "P" in block else None
    D = _matrix(cfg, block["D"], "problem.D", m) if "D" in block else None
    try:
        return ProblemSpec(f, h, lstar, LinearOperator(A), P, D)
    except (ValueError, linalg.LinalgError) as exc:
        raise ConfigError(str(exc), "problem") from None


def _lam(cfg: ExperimentConfig, spec: ProblemSpec) -> float:
    """``params.lam``, or ``params.lam_scale / lmax(G)`` relative to the spectral bound."""
    p = cfg.params
    if "lam" not in p and "lam_scale" in p:
        scale = _number(p, "lam_scale", "params")
        return scale / linalg.gen_eig_max(spec.A.gram(spec.Pinv), spec.D)
    return _number(p, "lam", "params")


def _pd_params(cfg: ExperimentConfig, spec: ProblemSpec) -> PdParams:
    p = cfg.params
    gamma = _number(p, "gamma", "params")
    lam = _lam(cfg, spec)
    theta = p.get("theta", "default")
    if not (theta in ("default", "best") or (isinstance(theta, (int, float))
                                              and not isinstance(theta, bool))):
        raise ConfigError("must be 'default', 'best' or a number", "params.theta")
    return PdParams(gamma, lam, theta,
                    _number(p, "max_iters", "params", 1000, integer=True),
                    _number(p, "tol", "params", 1e-10),
                    bool(p.get("override", False)),
                    _number(cfg.output, "thin", "output", 1, integer=True))


def _initial_vector(cfg: ExperimentConfig, key: str, dim: int):
    value = cfg.params.get(key)
    if value is None:
        return None
    if value == "random":
        return Xoshiro256(cfg.seed + (1 if key == "x0" else 2)).normal_array(dim)
    v = np.asarray(value, dtype=float).ravel()
    if v.size != dim:
        raise ConfigError(f"expected {dim} entries", f"params.{key}")
    return v


def _write_outputs(cfg: ExperimentConfig, report: RunReport, trace_text: str | None):
    out = cfg.output
    if trace_text is not None and out.get("trace"):
        cfg.path(out["trace"]).write_text(trace_text)
    if out.get("report"):
        cfg.path(out["report"]).write_text(json.dumps(_jsonable(report.to_dict()), indent=2) + "\n")


def run(cfg: ExperimentConfig) -> RunReport:
    """Dispatch a config; writes the trace CSV and JSON report named in ``output``."""
    t0 = time.perf_counter()
    handler = {"solve": _run_solve, "certify": _run_certify,
               "consensus": _run_consensus, "probe": _run_probe}[cfg.mode]
    report, trace_text = handler(cfg)
    report.wall_time = time.perf_counter() - t0
    _write_outputs(cfg, report, trace_text)
    return report


def _run_solve(cfg: ExperimentConfig):
    spec = build_spec(cfg)
    params = _pd_params(cfg, spec)
    x0 = _initial_vector(cfg, "x0", spec.A.domain_dim)
    s0 = _initial_vector(cfg, "s0", spec.A.codomain_dim)
    blowup = _number(cfg.params, "blowup", "params", 1e150)
    try:
        cert = certify(spec, params.gamma, params.lam, params.theta, params.override)
    except InfeasibleParameters as exc:
        return RunReport("solve", "infeasible", details={"reasons": exc.reasons}), None
    reference = None
    if cfg.output.get("reference"):
        ref_params = PdParams(params.gamma, params.lam, params.theta,
                              max(20 * params.max_iters, 10000), 1e-13, params.override)
        try:
            ref = solve(spec, ref_params, x0, s0, cert=cert, blowup=blowup)
            if ref.status == "converged":
                reference = (ref.state.x, ref.state.s)
        except NumericalDivergence:
            pass
    try:
        result = solve(spec, params, x0, s0, reference, cert, blowup)
    except NumericalDivergence as exc:
        return RunReport("solve", "diverged", exc.iteration, None, cert.snapshot(),
                         details={"error": str(exc)}), None
    state = result.state
    report = RunReport("solve", result.status, state.k,
                       result.trace[-1].residual if result.trace else None, cert.snapshot(),
                       details={"x": state.x, "s": state.s, "warnings": list(cert.warnings)})
    return report, format_csv(TRACE_COLUMNS, result.trace)


def _run_certify(cfg: ExperimentConfig):
    spec = build_spec(cfg)
    p = cfg.params
    gamma = _number(p, "gamma", "params")
    lam = _lam(cfg, spec)
    cert = certify(spec, gamma, lam, p.get("theta", "default"), override=True)
    status = "feasible" if cert.feasible else "infeasible"
    return RunReport("certify", status, certificate=cert.snapshot(),
                     details={"reasons": list(cert.reasons),
                              "warnings": list(cert.warnings)}), None


def _load_graph(cfg: ExperimentConfig, value, where: str) -> cons.Graph:
    path = cfg.path(value)
    if not path.exists():
        raise ConfigError(f"file not found: {path}", where)
    try:
        return cons.Graph.read(path)
    except cons.GraphError as exc:
        raise ConfigError(str(exc), where) from None


def build_consensus(cfg: ExperimentConfig) -> cons.ConsensusProblem:
    block = cfg.problem
    if "family" in block:
        try:
            prob = generate_problem(block["family"], block.get("size", {}), cfg.seed)
        except ValueError as exc:
            raise ConfigError(str(exc), "problem.family") from None
        if not isinstance(prob, cons.ConsensusProblem):
            raise ConfigError("not a consensus family", "problem.family")
        return prob
    g, W = _graph_and_w(cfg, block, "problem")
    if "targets" not in block:
        raise ConfigError("missing required field", "problem.targets")
    Y = np.asarray(block["targets"], dtype=float)
    if Y.ndim == 1:
        Y = Y.reshape(-1, 1)
    if Y.shape[0] != W.shape[0]:
        raise ConfigError(f"expected {W.shape[0]} rows", "problem.targets")
    prob = cons.quadratic_problem(W, Y, g, block.get("weights"))
    if "r" in block:
        try:
            r = tuple(prox_from_config(block["r"], prob.p) for _ in range(prob.n))
        except (ValueError, KeyError) as exc:
            raise ConfigError(str(exc), "problem.r") from None
        prob = cons.ConsensusProblem(prob.W, prob.smooth, r, g)
    return prob


def _graph_and_w(cfg, block, where):
    if "graph" not in block:
        raise ConfigError("missing required field", f"{where}.graph")
    gspec = block["graph"]
    if gspec == "swap":
        g, W = cons.path_graph(2), cons.SWAP_W.copy()
    elif isinstance(gspec, dict):
        try:
            g, W = _graph_from(gspec, Xoshiro256(cfg.seed))
        except (ValueError, cons.GraphError) as exc:
            raise ConfigError(str(exc), f"{where}.graph") from None
    else:
        g = _load_graph(cfg, gspec, f"{where}.graph")
        W = None
    wspec = block.get("W", "metropolis" if W is None else None)
    if wspec == "metropolis":
        try:
            W = cons.metropolis_weights(g)
        except cons.GraphError as exc:
            raise ConfigError(str(exc), f"{where}.graph") from None
    elif wspec == "swap":
        W = cons.SWAP_W.copy()
    elif wspec is not None:
        W = _matrix(cfg, wspec, f"{where}.W")
    if W.shape != (g.n, g.n):
        raise ConfigError(f"mixing matrix must be {g.n}x{g.n}", f"{where}.W")
    return g, W


def _is_unit_quadratic(prob: cons.ConsensusProblem) -> bool:
    for o in prob.smooth:
        if o.kind != "quadratic":
            return False
        K = o.params["K"]
        if K.shape[0] != K.shape[1] or not np.allclose(K, K[0, 0] * np.eye(K.shape[0])):
            return False
    return len({round(o.lipschitz, 12) for o in prob.smooth}) == 1


def _run_consensus(cfg: ExperimentConfig):
    prob = build_consensus(cfg)
    p = cfg.params
    alpha = _number(p, "alpha", "params")
    max_iters = _number(p, "max_iters", "params", 1000, integer=True)
    tol = _number(p, "tol", "params", 1e-10)
    blowup = _number(p, "blowup", "params", 1e6)
    thin = _number(cfg.output, "thin", "output", 1, integer=True)
    details = {"n": prob.n, "p": prob.p, "L": prob.L}
    for regime in ("classic", "extended"):
        try:
            details[f"{regime}_bound"] = cons.stepsize_bound(prob.W, prob.L, regime)
        except ValueError as exc:
            details[f"{regime}_bound"] = None
            details[f"{regime}_error"] = str(exc)
    if _is_unit_quadratic(prob):
        details["amplification"] = cons.extra_amplification(prob.W, alpha, prob.L)
    certificate = {}
    try:
        cc = cons.consensus_rate_certificate(prob, alpha)
        certificate = {"rho2": cc.rho2, "C1": cc.C1, "C2": cc.C2, "reason": cc.reason}
        if cc.cert is not None:
            certificate["theta"] = cc.cert.theta
    except ValueError as exc:
        certificate = {"reason": str(exc)}
    reference = None
    if prob.r_is_zero and all(o.kind == "quadratic" for o in prob.smooth):
        reference = cons.quadratic_fixed_point(prob)[0]
    X0 = np.zeros((prob.n, prob.p))
    if p.get("x0") == "random":
        X0 = Xoshiro256(cfg.seed + 1).normal_array(prob.n, prob.p)
    result = cons.run_extra(prob, alpha, X0, max_iters, tol, blowup, reference, thin)
    details["X"] = result.state.X
    if result.detail:
        details["error"] = result.detail
    report = RunReport("consensus", result.status, result.state.k,
                       result.trace[-1].residual if result.trace else None,
                       certificate, details=details)
    return report, format_csv(CONSENSUS_COLUMNS, result.trace)


def parse_grid(text: str) -> list[float]:
    """``a:b:step`` (inclusive of ``b``) or a comma-separated list; must be ascending."""
    text = text.strip()
    if not text:
        raise ValueError("empty grid")
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid must be a:b:step, got {text!r}")
        a, b, step = (float(x) for x in parts)
        if not step > 0 or b < a:
            raise ValueError(f"grid needs step > 0 and a <= b, got {text!r}")
        count = int(math.floor((b - a) / step + 1e-9)) + 1
        grid = [round(a + i * step, 12) for i in range(count)]
    else:
        grid = [float(x) for x in text.split(",") if x.strip()]
    return check_grid(grid)


def check_grid(grid) -> list[float]:
    grid = [float(x) for x in grid]
    if not grid:
        raise ValueError("empty grid")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must be strictly ascending")
    return grid


PROBE_COLUMNS = ("alpha", "amplification", "classic_ok", "extended_ok")


def probe_table(W, grid, L_scale: float = 1.0) -> list[dict]:
    bounds = {}
    for regime in ("classic", "extended"):
        try:
            bounds[regime] = cons.stepsize_bound(W, L_scale, regime)
        except ValueError:
            bounds[regime] = 0.0
    return [{"alpha": a, "amplification": cons.extra_amplification(W, a, L_scale),
             "classic_ok": int(a < bounds["classic"]), "extended_ok": int(a < bounds["extended"])}
            for a in check_grid(grid)]


def _run_probe(cfg: ExperimentConfig):
    _, W = _graph_and_w(cfg, cfg.problem, "problem")
    grid_spec = cfg.params.get("alpha_grid")
    if grid_spec is None:
        raise ConfigError("missing required field", "params.alpha_grid")
    try:
        grid = parse_grid(grid_spec) if isinstance(grid_spec, str) else check_grid(grid_spec)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc), "params.alpha_grid") from None
    L = _number(cfg.params, "L", "params", 1.0)
    rows = probe_table(W, grid, L)
    # the probe "diverges" as soon as one grid point amplifies
    status = "diverged" if any(r["amplification"] >= 1.0 for r in rows) else "converged"
    return RunReport("probe", status, details={"table": rows}), format_csv(PROBE_COLUMNS, rows)


# -- sweeps ----------------------------------------------------------------

SWEEP_COLUMNS = ("value", "classic_ok", "extended_ok", "status", "iterations",
                 "final_residual", "contraction")


def _contraction(residuals) -> float | None:
    """Geometric-mean residual ratio over the second half of a run."""
    r = [x for x in residuals if x is not None and x > 0 and math.isfinite(x)]
    if len(r) < 4:
        return None
    half = len(r) // 2
    return (r[-1] / r[half]) ** (1.0 / (len(r) - 1 - half))


def sweep_stepsize(cfg: ExperimentConfig, alpha_grid=None, lam_grid=None,
                   budget: int | None = None) -> list[dict]:
    """Run a consensus config over ``alpha_grid`` or a solve config over ``lam_grid``.

    Each row has the classic/extended feasibility flags, the final status and
    residual after a fixed iteration budget, and a measured contraction factor.
    """
    if (alpha_grid is None) == (lam_grid is None):
        raise ValueError("give exactly one of alpha_grid and lam_grid")
    rows = []
    if alpha_grid is not None:
        grid = check_grid(alpha_grid)
        prob = build_consensus(cfg)
        budget = budget or _number(cfg.params, "max_iters", "params", 1000, integer=True)
        tol = _number(cfg.params, "tol", "params", 1e-10)
        classic = _safe_bound(prob.W, prob.L, "classic")
        extended = _safe_bound(prob.W, prob.L, "extended")
        X0 = np.zeros((prob.n, prob.p))
        for a in grid:
            res = cons.run_extra(prob, a, X0, budget, tol, 1e6)
            rows.append({"value": a, "classic_ok": int(a < classic), "extended_ok": int(a < extended),
                         "status": res.status, "iterations": res.state.k,
                         "final_residual": res.trace[-1].residual if res.trace else None,
                         "contraction": _contraction([t.residual for t in res.trace])})
        return rows
    grid = check_grid(lam_grid)
    spec = build_spec(cfg)
    gamma = _number(cfg.params, "gamma", "params")
    budget = budget or _number(cfg.params, "max_iters", "params", 1000, integer=True)
    tol = _number(cfg.params, "tol", "params", 1e-10)
    lmax = linalg.gen_eig_max(spec.A.gram(spec.Pinv), spec.D)
    for lam in grid:
        cert = certify(spec, gamma, lam, override=True)
        params = PdParams(gamma, lam, cert.theta, budget, tol, override=True)
        try:
            res = solve(spec, params, cert=cert, blowup=1e6)
            status, k, trace = res.status, res.state.k, res.trace
        except NumericalDivergence as exc:
            status, k, trace = "diverged", exc.iteration, []
        rows.append({"value": lam, "classic_ok": int(lam * lmax < 1.0),
                     "extended_ok": int(cert.feasible), "status": status, "iterations": k,
                     "final_residual": trace[-1].residual if trace else None,
                     "contraction": _contraction([t.residual for t in trace])})
    return rows


def _safe_bound(W, L, regime):
    try:
        return cons.stepsize_bound(W, L, regime)
    except ValueError:
        return 0.0


def format_sweep(rows) -> str:
    lines = [",".join(SWEEP_COLUMNS)]
    for r in rows:
        lines.append(",".join(r[c] if isinstance(r[c], str) else format_number(r[c])
                              for c in SWEEP_COLUMNS))
    return "\n".join(lines) + "\n"
