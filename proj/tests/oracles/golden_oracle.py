"""Independent high-precision oracle for golden values frozen into the C++ tests.

Run with `python3 tests/oracles/golden_oracle.py`. Uses mpmath only; shares no
code with the library.
"""
import mpmath as mp

mp.mp.dps = 40
log, sqrt, e = mp.log, mp.sqrt, mp.e


def show(name, v):
    print(f"{name:<28} {mp.nstr(v, 20)}")


# kernels
show("gauss_sigma2_dist2", mp.exp(-mp.mpf(4) / 4))

# hoeffding_last_term
show("hoeffding_B1_n2_delta2e2", 1 * sqrt(log(2 / (2 / e**2)) / (2 * 2)))
show("hoeffding_B2_n100_d005", 2 * sqrt(log(2 / mp.mpf("0.05")) / 200))

# emp_discrepancy_bound
def discrepancy(B, C, ntr, nte, d):
    return C * sqrt(2 * (B**2 / mp.mpf(ntr) + 1 / mp.mpf(nte)) * log(2 / d))
show("discrepancy_B2_C1_100_400", discrepancy(2, 1, 100, 400, mp.mpf("0.05")))

# bound_thm1
def thm1(B, C, nm, ntr, nte, d):
    M = 1 + 2 * C * nm
    return M * sqrt(2 * (B**2 / mp.mpf(ntr) + 1 / mp.mpf(nte)) * log(6 / d))
show("thm1_B2_C1_m1_100", thm1(2, 1, 1, 100, 100, mp.mpf("0.05")))

# bound_thm2
def thm2(B, C, C2, th, ntr, nte, d):
    ntr, nte, th = mp.mpf(ntr), mp.mpf(nte), mp.mpf(th)
    D2 = 2 * C * sqrt(2 * (B**2 / ntr + 1 / nte) * log(8 / d)) + B * C * sqrt(log(8 / d) / (2 * ntr))
    Ct = (1 + 2 / th) * (th / 2) ** (2 / (th + 2))
    hoeff = B * sqrt(9 / (2 * ntr) * log(8 / d))
    approx = Ct * (B * C2) ** (2 / (th + 2)) * D2 ** (th / (th + 2))
    return D2, Ct, hoeff, approx, hoeff + approx
D2, Ct, h, a, t = thm2(2, 1, 1, 2, 100, 100, mp.mpf("0.05"))
show("thm2_D2", D2); show("thm2_Ctheta", Ct); show("thm2_hoeff", h); show("thm2_approx", a); show("thm2_total", t)
show("ctheta_0.5", thm2(1, 1, 1, mp.mpf("0.5"), 10, 10, mp.mpf("0.1"))[1])

# bound_thm3
def thm3(B, C, Ci, s, ntr, nte, d):
    ntr, nte, s = mp.mpf(ntr), mp.mpf(nte), mp.mpf(s)
    Dinf = 2 * C * sqrt(2 * (B**2 / ntr + 1 / nte) * log(6 / d))
    arg = s * B * Ci / Dinf
    t1 = (1 + 1 / s) ** s * B * Ci * log(arg) ** (-s)
    t2 = B * sqrt(2 / ntr * log(6 / d))
    t3 = (s * B * Ci) ** (s / (s + 1)) * Dinf ** (1 / (s + 1))
    return Dinf, arg, t1, t2, t3, t1 + t2 + t3
Dinf, arg, t1, t2, t3, t = thm3(2, 1, 5, 1, 10**4, 10**4, mp.mpf("0.05"))
show("thm3_Dinf", Dinf); show("thm3_logarg", arg); show("thm3_approx", t1)
show("thm3_hoeff", t2); show("thm3_disc", t3); show("thm3_total", t)

# bound_thm4
def thm4(B, C1, th, ntr, nte, d):
    ntr, nte, th = mp.mpf(ntr), mp.mpf(nte), mp.mpf(th)
    a = sqrt(log(4 / d) / (2 * nte))
    b = sqrt(B) * C1 * ntr ** (-3 * th / (12 * th + 16))
    return a, b, a + b
a, b, t = thm4(4, 1, 2, 10**4, 10**4, mp.mpf("0.05"))
show("thm4_test", a); show("thm4_reg", b); show("thm4_total", t)

show("rate_kmm_theta2", mp.mpf(2) / (2 * 4))
show("rate_plugin_theta2", mp.mpf(6) / 40)

# Scenario S1/S2 constants: truncated normals on [0, 1], kernel sigma 0.5.
sd = mp.mpf("0.15")
def tn_pdf(mu):
    Z = mp.ncdf((1 - mu) / sd) - mp.ncdf((0 - mu) / sd)
    return lambda x: mp.npdf(x, mu, sd) / Z
ptr, pte = tn_pdf(mp.mpf("0.3")), tn_pdf(mp.mpf("0.6"))
beta = lambda x: pte(x) / ptr(x)
show("S1_B_true", beta(mp.mpf(1)))
show("S1_int_beta_ptr", mp.quad(lambda x: beta(x) * ptr(x), [0, 1]))
sig2 = mp.mpf("0.25")
z = [mp.mpf("0.2"), mp.mpf("0.5"), mp.mpf("0.8")]
acoef = [mp.mpf("1.5"), mp.mpf("-2.0"), mp.mpf("1.6")]
m1 = lambda x: sum(ai * mp.exp(-(x - zi) ** 2 / sig2) for ai, zi in zip(acoef, z))
show("S1_norm_m", sqrt(sum(acoef[i] * acoef[j] * mp.exp(-(z[i] - z[j]) ** 2 / sig2)
                             for i in range(3) for j in range(3))))
show("S1_ey_te", mp.quad(lambda x: m1(x) * pte(x), [0, 0.5, 1]))

sy = mp.mpf("0.05")
def clipped_mean(mu):
    a, b = (0 - mu) / sy, (1 - mu) / sy
    Phi = lambda t: mp.ncdf(t)
    phi = lambda t: mp.npdf(t)
    return mu * (Phi(b) - Phi(a)) + sy * (phi(a) - phi(b)) + (1 - Phi(b))
tri = lambda x: mp.mpf("0.1") + mp.mpf("1.6") * (x if x < mp.mpf("0.5") else 1 - x)
show("S2_ey_te", mp.quad(lambda x: clipped_mean(tri(x)) * pte(x), [0, 0.5, 1]))
show("S1_E_te_x", mp.quad(lambda x: x * pte(x), [0, 1]))
