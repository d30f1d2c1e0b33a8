"""Pure-Python Dormand-Prince 5(4) stepper, same contract as the compiled one."""

import math

import numpy as np

A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
)
B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84)
E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)
D = (
    -12715105075 / 11282082432, 0.0, 87487479700 / 32700410799,
    -10690763975 / 1880347072, 701980252875 / 199316789632,
    -1453857185 / 822651844, 69997945 / 29380423,
)


def _rhs(u, v):
    return v, u * u * u - u


def integrate(x0, y0, s_end, rtol, atol, cutoff, max_steps):
    """Integrate from s=0 to s_end; see the compiled module for the status codes."""
    direction = 1.0 if s_end >= 0.0 else -1.0
    s, u, v = 0.0, float(x0), float(y0)
    ss, ys, rc = [0.0], [(u, v)], []
    k1 = _rhs(u, v)
    sku = atol + rtol * abs(u)
    skv = atol + rtol * abs(v)
    d0 = math.sqrt(0.5 * ((u / sku) ** 2 + (v / skv) ** 2))
    d1 = math.sqrt(0.5 * ((k1[0] / sku) ** 2 + (k1[1] / skv) ** 2))
    h = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    if s_end == 0.0:
        return np.array(ss), np.array(ys), np.empty((0, 5, 2)), 0
    h = min(h, abs(s_end), 0.1) * direction
    status, steps, rejected = 0, 0, False
    while True:
        if (s_end - s) * direction <= 0.0:
            status = 0
            break
        if steps >= max_steps:
            status = 3
            break
        if (s + h - s_end) * direction > 0.0:
            h = s_end - s
        if abs(h) < 1e-14 * max(abs(s), 1.0):
            status = 2
            break
        steps += 1
        k = [k1]
        for i in range(1, 6):
            yu = u + h * sum(a * kk[0] for a, kk in zip(A[i], k))
            yv = v + h * sum(a * kk[1] for a, kk in zip(A[i], k))
            k.append(_rhs(yu, yv))
        nu = u + h * sum(b * kk[0] for b, kk in zip(B, k))
        nv = v + h * sum(b * kk[1] for b, kk in zip(B, k))
        k.append(_rhs(nu, nv))
        eu = h * sum(e * kk[0] for e, kk in zip(E, k))
        ev = h * sum(e * kk[1] for e, kk in zip(E, k))
        sku = atol + rtol * max(abs(u), abs(nu))
        skv = atol + rtol * max(abs(v), abs(nv))
        err = math.sqrt(0.5 * ((eu / sku) ** 2 + (ev / skv) ** 2))
        if err != err:
            err = 1e10
        if err <= 1.0:
            du, dv = nu - u, nv - v
            r2u, r2v = h * k[0][0] - du, h * k[0][1] - dv
            rc.append((
                (u, v),
                (du, dv),
                (r2u, r2v),
                (du - h * k[6][0] - r2u, dv - h * k[6][1] - r2v),
                (h * sum(d * kk[0] for d, kk in zip(D, k)),
                 h * sum(d * kk[1] for d, kk in zip(D, k))),
            ))
            s, u, v = s + h, nu, nv
            k1 = k[6]
            ss.append(s)
            ys.append((u, v))
            if abs(u) >= cutoff:
                status = 1
                break
            fac = min(0.9 * max(err, 1e-10) ** -0.2, 2.0 if rejected else 10.0)
            rejected = False
            h *= max(fac, 0.2)
        else:
            rejected = True
            h *= max(0.9 * err ** -0.2, 0.2)
    rcont = np.array(rc).reshape(-1, 5, 2)
    return np.array(ss), np.array(ys), rcont, status


def dense_eval(s_nodes, rcont, query):
    """Evaluate the continuous extension at each query point (nodes monotone)."""
    s_nodes = np.asarray(s_nodes)
    query = np.asarray(query, dtype=float)
    if s_nodes[-1] >= s_nodes[0]:
        idx = np.searchsorted(s_nodes, query, side="right") - 1
    else:
        idx = np.searchsorted(-s_nodes, -query, side="right") - 1
    idx = np.clip(idx, 0, len(s_nodes) - 2)
    h = s_nodes[idx + 1] - s_nodes[idx]
    th = ((query - s_nodes[idx]) / h)[:, None]
    th1 = 1.0 - th
    r = rcont[idx]
    return r[:, 0] + th * (r[:, 1] + th1 * (r[:, 2] + th * (r[:, 3] + th1 * r[:, 4])))
