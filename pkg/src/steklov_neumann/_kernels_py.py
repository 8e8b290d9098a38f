"""Pure-Python reference implementations of the compiled kernels.

Behaviour must match ``_kernels.pyx`` exactly; tests compare the two.
"""
import numpy as np

CHUNK = 1 << 16


def harmonic_series(x, y, c_one, c_log, alpha, beta, scale_out, scale_in, gradient=False):
    """Evaluate ``c_one + c_log log(r/scale_in) + Re F(z) + Re G(z)``.

    ``F(z) = sum_k alpha[k-1] (z/scale_out)^k`` and
    ``G(z) = sum_k beta[k-1] (scale_in/z)^k``. Points are relative to the
    expansion center. With ``gradient=True`` also returns d/dx and d/dy.
    """
    x = np.ascontiguousarray(x, dtype=float)
    y = np.ascontiguousarray(y, dtype=float)
    alpha = np.asarray(alpha, dtype=complex)
    beta = np.asarray(beta, dtype=complex)
    P = x.shape[0]
    val = np.empty(P)
    gx = np.empty(P) if gradient else None
    gy = np.empty(P) if gradient else None
    use_neg = beta.size > 0 or c_log != 0.0
    for lo in range(0, P, CHUNK):
        hi = min(P, lo + CHUNK)
        z = x[lo:hi] + 1j * y[lo:hi]
        w = z / scale_out
        F = np.zeros_like(z)
        dF = np.zeros_like(z)
        N = alpha.size
        for k in range(N, 0, -1):
            F = F * w + alpha[k - 1]
            dF = dF * w + k * alpha[k - 1]
        F = F * w
        dF = dF / scale_out
        total = F
        H = dF
        u = np.full(hi - lo, float(c_one))
        if use_neg:
            v = scale_in / z
            G = np.zeros_like(z)
            dG = np.zeros_like(z)
            for k in range(beta.size, 0, -1):
                G = G * v + beta[k - 1]
                dG = dG * v + k * beta[k - 1]
            G = G * v
            total = total + G
            H = H - dG * v / z
            r2 = x[lo:hi] ** 2 + y[lo:hi] ** 2
            u += c_log * 0.5 * np.log(r2 / scale_in**2)
        val[lo:hi] = u + total.real
        if gradient:
            gx[lo:hi] = H.real
            gy[lo:hi] = -H.imag
            if use_neg and c_log != 0.0:
                gx[lo:hi] += c_log * x[lo:hi] / r2
                gy[lo:hi] += c_log * y[lo:hi] / r2
    if gradient:
        return val, gx, gy
    return val


def _find(parent, i):
    root = i
    while parent[root] != root:
        root = parent[root]
    while parent[i] != root:
        parent[i], i = root, parent[i]
    return root


def label_components(sign):
    """Label 4-connected components of equal non-zero sign.

    Cells with ``sign == 0`` are background (label 0). Labels are numbered
    1..count in raster order of each component's first cell.
    Returns ``(labels, count)``.
    """
    sign = np.ascontiguousarray(sign, dtype=np.int8)
    ny, nx = sign.shape
    labels = np.zeros((ny, nx), dtype=np.int32)
    parent = [0]
    s = sign.tolist()
    lab = [[0] * nx for _ in range(ny)]
    for i in range(ny):
        row, lrow = s[i], lab[i]
        prev_row = s[i - 1] if i else None
        prev_lab = lab[i - 1] if i else None
        for j in range(nx):
            v = row[j]
            if v == 0:
                continue
            left = lrow[j - 1] if j and row[j - 1] == v else 0
            up = prev_lab[j] if i and prev_row[j] == v else 0
            if left and up:
                a, b = _find(parent, left), _find(parent, up)
                if a != b:
                    if a < b:
                        parent[b] = a
                    else:
                        parent[a] = b
                lrow[j] = left
            elif left or up:
                lrow[j] = left or up
            else:
                parent.append(len(parent))
                lrow[j] = len(parent) - 1
    # resolve roots, then renumber by first appearance
    final = [0] * len(parent)
    count = 0
    for i in range(ny):
        lrow = lab[i]
        for j in range(nx):
            t = lrow[j]
            if t:
                r = _find(parent, t)
                if not final[r]:
                    count += 1
                    final[r] = count
                lrow[j] = final[r]
    labels[:] = lab
    return labels, count
