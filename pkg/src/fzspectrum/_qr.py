"""Hessenberg QR kernels (eigenvalues only), compiled with numba.

``hqr_real`` is the Francis double-shift iteration for real upper Hessenberg
matrices; ``hqr_complex`` is an explicitly shifted single-shift iteration with
Wilkinson shifts for complex ones.  Both deflate when a subdiagonal entry
drops below ``eps * (|h_kk| + |h_k+1,k+1|)`` and only touch the active block.
Each returns a status index: -1 on success, else the trailing index of the
block that failed to converge (entries above it are still valid).
"""
import math

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _hess_norm(a):
    n = a.shape[0]
    s = 0.0
    for i in range(n):
        for j in range(max(i - 1, 0), n):
            s += abs(a[i, j])
    return s


@njit(cache=True, nogil=True)
def hqr_real(a, eps, max_its):
    n = a.shape[0]
    wr = np.zeros(n)
    wi = np.zeros(n)
    anorm = _hess_norm(a)
    nn = n - 1
    t = 0.0
    its = 0
    total = 0
    deflations = 0
    x = y = z = w = p = q = r = s = 0.0
    while nn >= 0:
        l = nn
        while l > 0:
            s = abs(a[l - 1, l - 1]) + abs(a[l, l])
            if s == 0.0:
                s = anorm
            if abs(a[l, l - 1]) <= eps * s:
                a[l, l - 1] = 0.0
                break
            l -= 1
        x = a[nn, nn]
        if l == nn:
            wr[nn] = x + t
            wi[nn] = 0.0
            nn -= 1
            its = 0
            deflations += 1
            continue
        y = a[nn - 1, nn - 1]
        w = a[nn, nn - 1] * a[nn - 1, nn]
        if l == nn - 1:
            p = 0.5 * (y - x)
            q = p * p + w
            z = math.sqrt(abs(q))
            x += t
            if q >= 0.0:
                z = p + math.copysign(z, p)
                wr[nn - 1] = x + z
                wr[nn] = x + z
                if z != 0.0:
                    wr[nn] = x - w / z
                wi[nn - 1] = 0.0
                wi[nn] = 0.0
            else:
                wr[nn - 1] = x + p
                wr[nn] = x + p
                wi[nn - 1] = z
                wi[nn] = -z
            nn -= 2
            its = 0
            deflations += 1
            continue
        if its >= max_its:
            return wr, wi, total, deflations, nn
        if its > 0 and its % 10 == 0:
            # exceptional shift
            t += x
            for i in range(nn + 1):
                a[i, i] -= x
            s = abs(a[nn, nn - 1]) + abs(a[nn - 1, nn - 2])
            x = 0.75 * s
            y = x
            w = -0.4375 * s * s
        its += 1
        total += 1
        m = nn - 2
        while m >= l:
            z = a[m, m]
            r = x - z
            s = y - z
            p = (r * s - w) / a[m + 1, m] + a[m, m + 1]
            q = a[m + 1, m + 1] - z - r - s
            r = a[m + 2, m + 1]
            s = abs(p) + abs(q) + abs(r)
            p /= s
            q /= s
            r /= s
            if m == l:
                break
            u = abs(a[m, m - 1]) * (abs(q) + abs(r))
            v = abs(p) * (abs(a[m - 1, m - 1]) + abs(z) + abs(a[m + 1, m + 1]))
            if u <= eps * v:
                break
            m -= 1
        for i in range(m, nn - 1):
            a[i + 2, i] = 0.0
            if i != m:
                a[i + 2, i - 1] = 0.0
        for k in range(m, nn):
            if k != m:
                p = a[k, k - 1]
                q = a[k + 1, k - 1]
                r = 0.0
                if k + 1 != nn:
                    r = a[k + 2, k - 1]
                x = abs(p) + abs(q) + abs(r)
                if x != 0.0:
                    p /= x
                    q /= x
                    r /= x
            s = math.copysign(math.sqrt(p * p + q * q + r * r), p)
            if s != 0.0:
                if k == m:
                    if l != m:
                        a[k, k - 1] = -a[k, k - 1]
                else:
                    a[k, k - 1] = -s * x
                p += s
                x = p / s
                y = q / s
                z = r / s
                q /= p
                r /= p
                for j in range(k, nn + 1):
                    p = a[k, j] + q * a[k + 1, j]
                    if k + 1 != nn:
                        p += r * a[k + 2, j]
                        a[k + 2, j] -= p * z
                    a[k + 1, j] -= p * y
                    a[k, j] -= p * x
                mmin = nn if nn < k + 3 else k + 3
                for i in range(l, mmin + 1):
                    p = x * a[i, k] + y * a[i, k + 1]
                    if k + 1 != nn:
                        p += z * a[i, k + 2]
                        a[i, k + 2] -= p * r
                    a[i, k + 1] -= p * q
                    a[i, k] -= p
    return wr, wi, total, deflations, -1


@njit(cache=True, nogil=True)
def hqr_complex(h, eps, max_its):
    n = h.shape[0]
    ev = np.zeros(n, dtype=np.complex128)
    cs = np.zeros(n, dtype=np.complex128)
    sn = np.zeros(n, dtype=np.complex128)
    anorm = _hess_norm(h)
    nn = n - 1
    its = 0
    total = 0
    deflations = 0
    while nn >= 0:
        l = nn
        while l > 0:
            s = abs(h[l - 1, l - 1]) + abs(h[l, l])
            if s == 0.0:
                s = anorm
            if abs(h[l, l - 1]) <= eps * s:
                h[l, l - 1] = 0.0
                break
            l -= 1
        if l == nn:
            ev[nn] = h[nn, nn]
            nn -= 1
            its = 0
            deflations += 1
            continue
        if its >= max_its:
            return ev, total, deflations, nn
        if its > 0 and its % 20 == 10:
            mu = h[nn, nn] + 0.75 * abs(h[nn, nn - 1].real)
        elif its > 0 and its % 20 == 0:
            mu = h[l, l] + 0.75 * abs(h[l + 1, l].real)
        else:
            a = h[nn - 1, nn - 1]
            b = h[nn - 1, nn]
            c = h[nn, nn - 1]
            d = h[nn, nn]
            half = 0.5 * (a - d)
            disc = np.sqrt(half * half + b * c)
            mu1 = 0.5 * (a + d) + disc
            mu2 = 0.5 * (a + d) - disc
            mu = mu1 if abs(mu1 - d) <= abs(mu2 - d) else mu2
        its += 1
        total += 1
        for i in range(l, nn + 1):
            h[i, i] -= mu
        for k in range(l, nn):
            xk = h[k, k]
            yk = h[k + 1, k]
            r = math.hypot(abs(xk), abs(yk))
            if r == 0.0:
                c = 1.0 + 0.0j
                s_ = 0.0 + 0.0j
            else:
                c = xk / r
                s_ = yk / r
            cs[k] = c
            sn[k] = s_
            cc = np.conj(c)
            sc = np.conj(s_)
            for j in range(k, nn + 1):
                hk = h[k, j]
                hk1 = h[k + 1, j]
                h[k, j] = cc * hk + sc * hk1
                h[k + 1, j] = -s_ * hk + c * hk1
        for k in range(l, nn):
            c = cs[k]
            s_ = sn[k]
            cc = np.conj(c)
            sc = np.conj(s_)
            top = k + 1 if k + 1 < nn else nn
            for i in range(l, top + 1):
                hk = h[i, k]
                hk1 = h[i, k + 1]
                h[i, k] = c * hk + s_ * hk1
                h[i, k + 1] = -sc * hk + cc * hk1
        for i in range(l, nn + 1):
            h[i, i] += mu
    return ev, total, deflations, -1


@njit(cache=True, nogil=True)
def hessenberg_reduce(a):
    """Householder reduction of a complex square matrix to upper Hessenberg form, in place."""
    n = a.shape[0]
    v = np.zeros(n, dtype=np.complex128)
    for k in range(n - 2):
        alpha = 0.0
        for i in range(k + 1, n):
            alpha += abs(a[i, k]) ** 2
        alpha = math.sqrt(alpha)
        if alpha == 0.0:
            continue
        x0 = a[k + 1, k]
        phase = x0 / abs(x0) if x0 != 0 else 1.0 + 0.0j
        for i in range(k + 1, n):
            v[i] = a[i, k]
        v[k + 1] += phase * alpha
        vn = 0.0
        for i in range(k + 1, n):
            vn += abs(v[i]) ** 2
        vn = math.sqrt(vn)
        for i in range(k + 1, n):
            v[i] /= vn
        # rows: A <- (I - 2 v v^H) A
        for j in range(k, n):
            acc = 0.0 + 0.0j
            for i in range(k + 1, n):
                acc += np.conj(v[i]) * a[i, j]
            for i in range(k + 1, n):
                a[i, j] -= 2.0 * v[i] * acc
        # columns: A <- A (I - 2 v v^H)
        for i in range(n):
            acc = 0.0 + 0.0j
            for j in range(k + 1, n):
                acc += a[i, j] * v[j]
            for j in range(k + 1, n):
                a[i, j] -= 2.0 * acc * np.conj(v[j])
        for i in range(k + 2, n):
            a[i, k] = 0.0
    return a
