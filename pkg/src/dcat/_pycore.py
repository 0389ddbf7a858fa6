"""Pure-Python RK4 stepping kernel, used when the compiled core is missing.

``advance`` integrates ``nsteps`` fixed steps starting at global step ``n0``.

x        state vector ``[v_cap(m), i_wind(m), i_mag, i_load]``, updated in place
n_half   steps per bridge half period (polarity +1 on even half periods)
n_pwm    steps per PWM period; the first ``n_high`` steps of each are high
params   ``[v_dc, c_module, l_leak, l_mag, r_winding_path, r_batt, r_load, r_path, l_load]``
phys     physical module index of every active module (recording columns)
rec      decimated record, columns ``[v_cap(M), i_wind(M), i_mag, i_load, v_out_mean]``
rec_period  capacitor voltages sampled at every bridge-period start
acc      accumulators ``[e_src, e_load, e_batt, e_wind, e_path, max_power_residual,
         v_out_partial_sum, prev_polarity, prev_pwm, bridge_flips, pwm_edges]``

Returns the global step index at which the state became non-finite, or -1.
"""

import math


def _deriv(x, m, s, tap, p, d, pw):
    v_dc, c, l_leak, l_mag, r_w, r_batt, r_load, r_path, l_load = p
    il = x[2 * m + 1]
    vstr = 0.0
    emf_sum = 0.0
    vtap = 0.0
    for k in range(m):
        vstr += x[k]
        emf_sum += s * x[k] - r_w * x[m + k]
        if k < tap:
            vtap += x[k]
    ib = (v_dc - vstr) / r_batt
    vstar = emf_sum / (m + l_leak / l_mag)
    stored_c = 0.0
    stored_l = 0.0
    dom = 0.0
    for k in range(m):
        d[m + k] = (s * x[k] - r_w * x[m + k] - vstar) / l_leak
        seg = ib - il if k < tap else ib
        d[k] = (seg - s * x[m + k]) / c
        t = c * x[k] * d[k]
        stored_c += t
        dom = max(dom, abs(t))
        t = l_leak * x[m + k] * d[m + k]
        stored_l += t
        dom = max(dom, abs(t))
    d[2 * m] = vstar / l_mag
    d[2 * m + 1] = (vtap - il * (r_load + r_path)) / l_load
    pw[0] = v_dc * ib
    pw[1] = r_load * il * il
    pw[2] = r_batt * ib * ib
    t = 0.0
    for k in range(m):
        t += x[m + k] * x[m + k]
    pw[3] = r_w * t
    pw[4] = r_path * il * il
    t = l_mag * x[2 * m] * d[2 * m]
    stored_l += t
    dom = max(dom, abs(t))
    t = l_load * il * d[2 * m + 1]
    stored_l += t
    dom = max(dom, abs(t))
    pw[5] = stored_c + stored_l
    for k in range(5):
        dom = max(dom, abs(pw[k]))
    return dom


def advance(x, m, n0, nsteps, dt, n_half, n_pwm, n_high, tap_low, tap_high,
            params, phys, n_phys, rec, decim, rec_period, period_steps, acc):
    n = 2 * m + 2
    p = [float(v) for v in params]
    phys = [int(k) for k in phys]
    xs = [float(v) for v in x]
    k1, k2, k3, k4, xt = ([0.0] * n for _ in range(5))
    pw1, pw2, pw3, pw4 = ([0.0] * 6 for _ in range(4))
    a = [float(v) for v in acc]
    h2 = 0.5 * dt
    h6 = dt / 6.0
    failed = -1
    for step in range(nsteps):
        nn = n0 + step
        s = 1.0 if (nn // n_half) % 2 == 0 else -1.0
        pwm_high = 1 if (nn % n_pwm) < n_high else 0
        tap = tap_high if pwm_high else tap_low

        if a[7] != 0.0 and a[7] != s:
            a[9] += 1.0
        a[7] = s
        if a[8] >= 0.0 and a[8] != pwm_high:
            a[10] += 1.0
        a[8] = float(pwm_high)

        vout = 0.0
        for k in range(tap):
            vout += xs[k]
        if nn % decim == 0:
            row = rec[nn // decim]
            for k in range(m):
                row[phys[k]] = xs[k]
                row[n_phys + phys[k]] = xs[m + k]
            row[2 * n_phys] = xs[2 * m]
            row[2 * n_phys + 1] = xs[2 * m + 1]
        if nn % period_steps == 0:
            row = rec_period[nn // period_steps]
            for k in range(m):
                row[phys[k]] = xs[k]
        a[6] += vout
        if (nn + 1) % decim == 0:
            rec[nn // decim, 2 * n_phys + 2] = a[6] / decim
            a[6] = 0.0

        dom = _deriv(xs, m, s, tap, p, k1, pw1)
        resid = pw1[0] - pw1[1] - pw1[2] - pw1[3] - pw1[4] - pw1[5]
        if dom > 0.0 and abs(resid) / dom > a[5]:
            a[5] = abs(resid) / dom
        for i in range(n):
            xt[i] = xs[i] + h2 * k1[i]
        _deriv(xt, m, s, tap, p, k2, pw2)
        for i in range(n):
            xt[i] = xs[i] + h2 * k2[i]
        _deriv(xt, m, s, tap, p, k3, pw3)
        for i in range(n):
            xt[i] = xs[i] + dt * k3[i]
        _deriv(xt, m, s, tap, p, k4, pw4)
        for i in range(n):
            xs[i] = xs[i] + h6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        for i in range(5):
            a[i] += h6 * (pw1[i] + 2.0 * pw2[i] + 2.0 * pw3[i] + pw4[i])
        if not all(math.isfinite(v) for v in xs):
            failed = nn + 1
            break
    x[:] = xs
    acc[:] = a
    return failed
