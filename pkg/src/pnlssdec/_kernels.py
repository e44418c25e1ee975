"""Sequential recursion kernels.

Everything here is written in scalar-loop style so numba can compile it;
if numba is unavailable the same functions run as plain Python (slow but
identical results).  Kernels return a status code instead of raising:
0 = ok, 1 = Newton failure, 2 = non-finite state; the wrapper modules
translate these into exceptions.
"""

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None


def _jit(func):
    if njit is None:  # pragma: no cover
        return func
    return njit(cache=True)(func)


_DIVERGENCE_LIMIT = 1e100


@_jit
def bw_newmark(u, h, m, c, k, alpha, beta, gamma, delta, nu,
               beta_n, gamma_n, tol, max_newton):
    """Implicit Newmark integration of the hysteretic oscillator.

    The displacement/velocity/acceleration follow the standard Newmark
    update with constants (beta_n, gamma_n); the internal hysteretic state
    advances with the matching one-step rule
    ``z+ = z + h*((1-gamma_n)*zdot + gamma_n*zdot+)``.  Each step solves the
    coupled residual in (acceleration, z) by a 2x2 Newton iteration.

    Returns ``(status, index, y, v, z)`` with one sample per entry of ``u``.
    """
    n = u.shape[0]
    y = np.zeros(n)
    v = np.zeros(n)
    z = np.zeros(n)

    yi = 0.0
    vi = 0.0
    zi = 0.0
    ai = u[0] / m  # zero initial conditions: m*a = u - c*v - k*y - z

    for i in range(n - 1):
        # hysteretic rate at the current point
        az0 = abs(zi)
        zp0 = az0 ** (nu - 1.0) * zi
        zn0 = az0 ** nu
        av0 = abs(vi)
        g0 = alpha * vi - beta * (gamma * av0 * zp0 + delta * vi * zn0)

        a_new = ai
        z_new = zi + h * g0
        converged = False
        for _ in range(max_newton):
            v_new = vi + h * ((1.0 - gamma_n) * ai + gamma_n * a_new)
            y_new = yi + h * vi + h * h * ((0.5 - beta_n) * ai + beta_n * a_new)

            az = abs(z_new)
            av = abs(v_new)
            azn1 = az ** (nu - 1.0)
            zp = azn1 * z_new
            zn = az ** nu
            g = alpha * v_new - beta * (gamma * av * zp + delta * v_new * zn)

            r1 = m * a_new + c * v_new + k * y_new + z_new - u[i + 1]
            r2 = z_new - zi - h * ((1.0 - gamma_n) * g0 + gamma_n * g)
            if abs(r1) < tol and abs(r2) < tol:
                converged = True
                break

            sv = 0.0
            if v_new > 0.0:
                sv = 1.0
            elif v_new < 0.0:
                sv = -1.0
            sz = 0.0
            if z_new > 0.0:
                sz = 1.0
            elif z_new < 0.0:
                sz = -1.0

            gv = alpha - beta * (gamma * sv * zp + delta * zn)
            gz = -beta * nu * azn1 * (gamma * av + delta * v_new * sz)

            j11 = m + c * gamma_n * h + k * beta_n * h * h
            j12 = 1.0
            j21 = -h * h * gamma_n * gamma_n * gv
            j22 = 1.0 - h * gamma_n * gz
            det = j11 * j22 - j12 * j21
            if det == 0.0:
                break
            a_new += (-r1 * j22 + r2 * j12) / det
            z_new += (r1 * j21 - r2 * j11) / det
            if not (np.isfinite(a_new) and np.isfinite(z_new)):
                return 2, i + 1, y, v, z

        if not converged:
            return 1, i + 1, y, v, z

        y_next = yi + h * vi + h * h * ((0.5 - beta_n) * ai + beta_n * a_new)
        v_next = vi + h * ((1.0 - gamma_n) * ai + gamma_n * a_new)
        yi = y_next
        vi = v_next
        ai = a_new
        zi = z_new
        if not (np.isfinite(yi) and np.isfinite(vi) and np.isfinite(zi)):
            return 2, i + 1, y, v, z
        y[i + 1] = yi
        v[i + 1] = vi
        z[i + 1] = zi

    return 0, -1, y, v, z


@_jit
def pnlss_sim(a, b, c, d, e, xpow, f, ypow, dmax, u):
    """Simulate ``x+ = A x + b u + E zeta(x,u)``, ``y = c'x + d u + f'eta``.

    ``xpow``/``ypow`` are integer exponent tables of shape
    ``(n_terms, n+1)`` over the variables (x_1..x_n, u); ``dmax`` bounds the
    entries.  Returns ``(status, index, y, x)`` where ``x[t]`` is the state
    before the update at time t (zero initial state).
    """
    n = a.shape[0]
    nt = u.shape[0]
    nzx = xpow.shape[0]
    nzy = ypow.shape[0]

    y = np.zeros(nt)
    x = np.zeros((nt, n))
    xt = np.zeros(n)
    ptab = np.empty((n + 1, dmax + 1))
    ptab[:, 0] = 1.0

    for t in range(nt):
        ut = u[t]
        for i in range(n):
            x[t, i] = xt[i]
            ptab[i, 1] = xt[i]
        ptab[n, 1] = ut
        for kv in range(n + 1):
            for dd in range(2, dmax + 1):
                ptab[kv, dd] = ptab[kv, dd - 1] * ptab[kv, 1]

        yt = d * ut
        for i in range(n):
            yt += c[i] * xt[i]
        for j in range(nzy):
            mon = 1.0
            for kv in range(n + 1):
                mon *= ptab[kv, ypow[j, kv]]
            yt += f[j] * mon
        y[t] = yt

        xn = np.zeros(n)
        for i in range(n):
            acc = b[i] * ut
            for jj in range(n):
                acc += a[i, jj] * xt[jj]
            xn[i] = acc
        for j in range(nzx):
            mon = 1.0
            for kv in range(n + 1):
                mon *= ptab[kv, xpow[j, kv]]
            for i in range(n):
                xn[i] += e[i, j] * mon
        for i in range(n):
            if not np.isfinite(xn[i]) or abs(xn[i]) > _DIVERGENCE_LIMIT:
                return 1, t, y, x
        xt = xn

    return 0, -1, y, x


@_jit
def pnlss_jac(a, b, c, d, e, xpow, f, ypow, dmax, u):
    """Output Jacobian of a polynomial state-space model by forward sensitivity.

    Parameter layout: ``[vec(A), b, c, d, vec(E), f]`` (row-major).
    Returns ``(status, index, jac)`` with ``jac`` of shape
    ``(len(u), n_par)``; rows past a divergence point are zero.
    """
    n = a.shape[0]
    nt = u.shape[0]
    nzx = xpow.shape[0]
    nzy = ypow.shape[0]

    oa = 0
    ob = n * n
    oc = ob + n
    od = oc + n
    oe = od + 1
    of_ = oe + n * nzx
    npar = of_ + nzy

    jac = np.zeros((nt, npar))
    sens = np.zeros((n, npar))
    xt = np.zeros(n)
    ptab = np.empty((n + 1, dmax + 1))
    ptab[:, 0] = 1.0
    zeta = np.empty(nzx)
    eta = np.empty(nzy)
    dzdx = np.empty((nzx, n))
    dedx = np.empty((nzy, n))
    w = np.empty(n)
    jx = np.empty((n, n))

    for t in range(nt):
        ut = u[t]
        for i in range(n):
            ptab[i, 1] = xt[i]
        ptab[n, 1] = ut
        for kv in range(n + 1):
            for dd in range(2, dmax + 1):
                ptab[kv, dd] = ptab[kv, dd - 1] * ptab[kv, 1]

        for j in range(nzx):
            mon = 1.0
            for kv in range(n + 1):
                mon *= ptab[kv, xpow[j, kv]]
            zeta[j] = mon
            for i in range(n):
                p = xpow[j, i]
                if p == 0:
                    dzdx[j, i] = 0.0
                else:
                    val = p * ptab[i, p - 1]
                    for kv in range(n + 1):
                        if kv != i:
                            val *= ptab[kv, xpow[j, kv]]
                    dzdx[j, i] = val
        for j in range(nzy):
            mon = 1.0
            for kv in range(n + 1):
                mon *= ptab[kv, ypow[j, kv]]
            eta[j] = mon
            for i in range(n):
                p = ypow[j, i]
                if p == 0:
                    dedx[j, i] = 0.0
                else:
                    val = p * ptab[i, p - 1]
                    for kv in range(n + 1):
                        if kv != i:
                            val *= ptab[kv, ypow[j, kv]]
                    dedx[j, i] = val

        # output row: (c' + f' deta/dx) sens + explicit c, d, f terms
        for i in range(n):
            wi = c[i]
            for j in range(nzy):
                wi += f[j] * dedx[j, i]
            w[i] = wi
        row = np.dot(w, sens)
        for i in range(n):
            row[oc + i] += xt[i]
        row[od] += ut
        for j in range(nzy):
            row[of_ + j] += eta[j]
        jac[t] = row

        # sensitivity update: sens <- (A + E dzeta/dx) sens + explicit terms
        for i in range(n):
            for jj in range(n):
                acc = a[i, jj]
                for j in range(nzx):
                    acc += e[i, j] * dzdx[j, jj]
                jx[i, jj] = acc
        sens = np.dot(jx, sens)
        for i in range(n):
            for jj in range(n):
                sens[i, oa + i * n + jj] += xt[jj]
            sens[i, ob + i] += ut
            for j in range(nzx):
                sens[i, oe + i * nzx + j] += zeta[j]

        # state update
        xn = np.zeros(n)
        for i in range(n):
            acc = b[i] * ut
            for jj in range(n):
                acc += a[i, jj] * xt[jj]
            for j in range(nzx):
                acc += e[i, j] * zeta[j]
            xn[i] = acc
        for i in range(n):
            if not np.isfinite(xn[i]) or abs(xn[i]) > _DIVERGENCE_LIMIT:
                return 1, t, jac
        xt = xn

    return 0, -1, jac


@_jit
def dec_sim(a, b, c, d, vmat, wx, wy, coef, u):
    """Simulate a decoupled model with r univariate polynomial branches.

    ``vmat`` is (n+1, r); branch l sees ``z_l = vmat[:, l]' (x; u)`` and
    evaluates ``g_l(z) = sum_{p=2..deg} coef[l, p-2] z^p``.  ``wx`` (n, r)
    feeds the state update, ``wy`` (r,) the output.  Returns
    ``(status, index, y, x)``.
    """
    n = a.shape[0]
    nt = u.shape[0]
    r = vmat.shape[1]
    deg = coef.shape[1] + 1  # coef columns cover powers 2..deg

    y = np.zeros(nt)
    x = np.zeros((nt, n))
    xt = np.zeros(n)
    g = np.empty(r)

    for t in range(nt):
        ut = u[t]
        for i in range(n):
            x[t, i] = xt[i]

        for l in range(r):
            zl = vmat[n, l] * ut
            for i in range(n):
                zl += vmat[i, l] * xt[i]
            acc = 0.0
            for pp in range(deg, 1, -1):
                acc = acc * zl + coef[l, pp - 2]
            g[l] = acc * zl * zl

        yt = d * ut
        for i in range(n):
            yt += c[i] * xt[i]
        for l in range(r):
            yt += wy[l] * g[l]
        y[t] = yt

        xn = np.zeros(n)
        for i in range(n):
            acc = b[i] * ut
            for jj in range(n):
                acc += a[i, jj] * xt[jj]
            for l in range(r):
                acc += wx[i, l] * g[l]
            xn[i] = acc
        for i in range(n):
            if not np.isfinite(xn[i]) or abs(xn[i]) > _DIVERGENCE_LIMIT:
                return 1, t, y, x
        xt = xn

    return 0, -1, y, x


@_jit
def dec_jac(a, b, c, d, vmat, wx, wy, coef, u):
    """Output Jacobian of a decoupled model by forward sensitivity.

    Parameter layout: ``[vec(A), b, c, d, vec(V), vec(W), vec(coef)]`` with
    V and W of shape (n+1, r) row-major (the last W row is the output
    combination) and coef of shape (r, deg-1) row-major (powers 2..deg).
    Returns ``(status, index, jac)``.
    """
    n = a.shape[0]
    nt = u.shape[0]
    r = vmat.shape[1]
    deg = coef.shape[1] + 1

    oa = 0
    ob = n * n
    oc = ob + n
    od = oc + n
    ov = od + 1
    ow = ov + (n + 1) * r
    oco = ow + (n + 1) * r
    npar = oco + r * (deg - 1)

    jac = np.zeros((nt, npar))
    sens = np.zeros((n, npar))
    xt = np.zeros(n)
    s = np.empty(n + 1)
    g = np.empty(r)
    gp = np.empty(r)
    zpow = np.empty((r, deg + 1))
    w = np.empty(n)
    jx = np.empty((n, n))

    for t in range(nt):
        ut = u[t]
        for i in range(n):
            s[i] = xt[i]
        s[n] = ut

        for l in range(r):
            zl = 0.0
            for j in range(n + 1):
                zl += vmat[j, l] * s[j]
            zpow[l, 0] = 1.0
            for pp in range(1, deg + 1):
                zpow[l, pp] = zpow[l, pp - 1] * zl
            acc = 0.0
            accp = 0.0
            for pp in range(deg, 1, -1):
                acc = acc * zl + coef[l, pp - 2]
                accp = accp * zl + pp * coef[l, pp - 2]
            g[l] = acc * zl * zl
            gp[l] = accp * zl

        # output row
        for i in range(n):
            wi = c[i]
            for l in range(r):
                wi += wy[l] * gp[l] * vmat[i, l]
            w[i] = wi
        row = np.dot(w, sens)
        for i in range(n):
            row[oc + i] += xt[i]
        row[od] += ut
        for l in range(r):
            row[ow + n * r + l] += g[l]
            for j in range(n + 1):
                row[ov + j * r + l] += wy[l] * gp[l] * s[j]
            for pp in range(2, deg + 1):
                row[oco + l * (deg - 1) + pp - 2] += wy[l] * zpow[l, pp]
        jac[t] = row

        # sensitivity update
        for i in range(n):
            for jj in range(n):
                acc = a[i, jj]
                for l in range(r):
                    acc += wx[i, l] * gp[l] * vmat[jj, l]
                jx[i, jj] = acc
        sens = np.dot(jx, sens)
        for i in range(n):
            for jj in range(n):
                sens[i, oa + i * n + jj] += xt[jj]
            sens[i, ob + i] += ut
            for l in range(r):
                sens[i, ow + i * r + l] += g[l]
                for j in range(n + 1):
                    sens[i, ov + j * r + l] += wx[i, l] * gp[l] * s[j]
                for pp in range(2, deg + 1):
                    sens[i, oco + l * (deg - 1) + pp - 2] += wx[i, l] * zpow[l, pp]

        # state update
        xn = np.zeros(n)
        for i in range(n):
            acc = b[i] * ut
            for jj in range(n):
                acc += a[i, jj] * xt[jj]
            for l in range(r):
                acc += wx[i, l] * g[l]
            xn[i] = acc
        for i in range(n):
            if not np.isfinite(xn[i]) or abs(xn[i]) > _DIVERGENCE_LIMIT:
                return 1, t, jac
        xt = xn

    return 0, -1, jac
