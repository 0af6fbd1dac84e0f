import numpy as np
import pytest

from sbx.core import Activation, LayerParams, Network


def random_network(rng, dims, dec_acts=None, scale=0.5):
    dec_acts = dec_acts or [Activation.TANH] * (len(dims) - 1)
    layers = []
    for k in range(len(dims) - 1):
        layers.append(LayerParams(scale * rng.normal(size=(dims[k + 1], dims[k])),
                                  scale * rng.normal(size=dims[k + 1]),
                                  scale * rng.normal(size=dims[k]),
                                  Activation.TANH, dec_acts[k]))
    return Network(layers)


def rank2_frames(seed, n=200, dim=8):
    """Rows spanned by two random directions, scaled into [-0.9, 0.9]."""
    g = np.random.default_rng(seed)
    x = g.uniform(-1, 1, (n, 2)) @ g.normal(size=(2, dim))
    return 0.9 * x / np.abs(x).max()


def _objective_ld(params, acts, x, target):
    """Batch-mean squared reconstruction error, evaluated in extended precision.

    Written independently of sbx.core so the oracle shares no code with the
    path it checks.
    """
    h = np.asarray(x, dtype=np.longdouble)
    for (w, b, _), (enc, _) in zip(params, acts):
        h = h @ w.T + b
        if enc == "tanh":
            h = np.tanh(h)
    for (w, _, c), (_, dec) in reversed(list(zip(params, acts))):
        h = h @ w + c
        if dec == "tanh":
            h = np.tanh(h)
    d = np.atleast_2d(h) - np.atleast_2d(np.asarray(target, dtype=np.longdouble))
    return np.mean(d * d)


def numeric_gradients(net, x_in, target, h=1e-6):
    """Central differences of the batch-mean squared error, parameter by parameter.

    The objective is evaluated in long double so rounding noise (about
    eps / h) stays far below the 1e-5 relative tolerance even for tiny
    partials; the step itself is the float64 h.
    """
    params = [[np.asarray(p, dtype=np.longdouble) for p in (layer.w, layer.b, layer.b_dec)]
              for layer in net.layers]
    acts = [(layer.enc_act.value, layer.dec_act.value) for layer in net.layers]
    out = []
    for layer_params in params:
        grads = []
        for param in layer_params:
            g = np.zeros(param.shape)
            for idx in np.ndindex(param.shape):
                orig = param[idx]
                param[idx] = orig + h
                up = _objective_ld(params, acts, x_in, target)
                param[idx] = orig - h
                down = _objective_ld(params, acts, x_in, target)
                param[idx] = orig
                g[idx] = float((up - down) / (2 * np.longdouble(h)))
            grads.append(g)
        out.append(grads)
    return out


def max_relative_error(analytic, numeric, floor=1e-8):
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    return float(np.max(np.abs(analytic - numeric) / denom))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line per acceptance criterion, then assert it."""
    def record(number, name, ok, detail=""):
        status = "PASS" if ok else "FAIL"
        ACCEPTANCE_LINES.append(f"{status} [{number}] {name}: {detail}")
        assert ok, f"criterion {number} ({name}) failed: {detail}"
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("[")[1].split("]")[0])):
            terminalreporter.write_line(line)
