"""High-precision oracle computations; results are frozen into the test suite."""
import mpmath as mp

mp.mp.dps = 40

E = mp.e

# --- profile: g_in(r) = c r exp(p(r)), c = sqrt(b), beta = 2 ---
def make_p(b):
    b = mp.mpf(b)
    return [mp.mpf(47)/60, mp.mpf(0), b, -mp.mpf(10)/3*b**mp.mpf('1.5'),
            mp.mpf(15)/4*b**2, -mp.mpf(6)/5*b**mp.mpf('2.5')]

def gin(b, r):
    r = mp.mpf(r)
    p = make_p(b)
    pr = sum(c * r**k for k, c in enumerate(p))
    return mp.sqrt(b) * r * mp.exp(pr)

# 1. bulk inverse: g(r*) sanity and r with g(r)=1.5 for b=1
b = mp.mpf(1)
assert abs(gin(1, 1) - E) < mp.mpf('1e-35')
root = mp.findroot(lambda r: gin(1, r) - mp.mpf('1.5'), mp.mpf('0.6'))
print("g_inverse(1.5) b=1:", mp.nstr(root, 25))
print("  check g(root) =", mp.nstr(gin(1, root), 25))

# 2. transformed value, t-dist d=2 kappa=1, b=1 beta=2, |y|=2 (tail branch)
d, kappa = 2, 1
r = mp.mpf(2)
u = b * r**2
fval = (d + kappa) / mp.mpf(2) * mp.log(1 + mp.exp(2*u))
log_gp = mp.log(2 * b * r) + u
log_g_over_r = u - mp.log(r)
fh = fval - log_gp - (d - 1) * log_g_over_r
print("transformed_value t-dist d2 k1 r=2:", mp.nstr(fh, 25))

# 3. radial gradient factor at r=1 (tail branch, t-dist d2 k1 b1 beta2)
def grad_factor(rr):
    rr = mp.mpf(rr)
    uu = b * rr**2
    fp = (d + kappa) / (1 + mp.exp(-2*uu))   # f'(e^u) e^u
    return fp * 2 * b * rr - 2 * b * d * rr + (d - 2) / rr
g1 = grad_factor(1)
print("grad factor r=1:", mp.nstr(g1, 25))
print("  closed 6e^2/(1+e^2)-4:", mp.nstr(6*E**2/(1+E**2) - 4, 25))

# 4. tula step from y=(1,0), gamma=0.01, noise=0
print("tula step coord0:", mp.nstr(1 - mp.mpf('0.01') * g1, 25))

# 5. planner example: L_h=8, C=4/7, d=4, eps=0.1, H0=4
Lh = mp.mpf(8); C = mp.mpf(4)/7; dd = 4; eps = mp.mpf('0.1'); H0 = mp.mpf(4)
gam = 1 / (2 * Lh**2 * C) * min(mp.mpf(1), eps / (4 * dd))
n = mp.ceil(C / (2 * gam) * mp.log(2 * H0 / eps))
print("planner gamma:", mp.nstr(gam, 25), " = 7/81920 =", mp.nstr(mp.mpf(7)/81920, 25))
print("planner n raw:", mp.nstr(C / (2*gam) * mp.log(2*H0/eps), 25), "-> n =", n)

# 6. Ito drift at x=(e,0), t-dist d2 k1 b1: u=g^{-1}(e)=1, g'(1)=2e, g''(1)=6e
gp, gpp = 2*E, 6*E
fpx = (d + kappa) * E / (1 + E**2)    # f'(|x|) at |x|=e
drift = -gp**2 * fpx + 2*gpp + (d-1)*gp**2/E - (d-1)*E/1
print("ito drift radial @|x|=e:", mp.nstr(drift, 25))
print("  sv radial sqrt2*2e:", mp.nstr(mp.sqrt(2)*2*E, 25), " sv tang sqrt2*e:", mp.nstr(mp.sqrt(2)*E, 25))

# 7. log-det examples
print("logdet d1 b1 r=2:", mp.nstr(mp.log(4) + 4, 25))
print("logdet r->0 d2 b1:", mp.nstr(2 * mp.mpf(47)/60, 25))

# 8. lambda_tangential r=1: same as grad factor (divide by r=1)
# 9. KS 1% asymptotic coefficient
print("ks99:", mp.nstr(mp.sqrt(-mp.log(mp.mpf('0.005'))/2), 25))

# 10. t-dist basics
print("t d2k1 f(1):", mp.nstr(mp.mpf(3)/2*mp.log(2), 25))

# 11. warmup d=2 R=1 sanity: g_in(R)=d R^2, f_h(r) - closed form at r=1.5 (tail)
dw = mp.mpf(2); R = mp.mpf(1)
def gin_w(r):
    r = mp.mpf(r)
    p = -mp.mpf(5)/6 + mp.mpf(3)/2*r**2/R**2 - mp.mpf(2)/3*r**3/R**3
    return dw*R*r*mp.exp(p)
assert abs(gin_w(1) - dw*R**2) < mp.mpf('1e-35')
rr = mp.mpf('1.5')
s = dw*rr**2
fhw_expect = mp.sqrt(1 + dw**2*rr**4) - dw/2*mp.log(dw) - mp.log(2)
fw = mp.sqrt(1+s**2) + dw/2*mp.log(s)
fhw = fw - mp.log(2*dw*rr) - (dw-1)*mp.log(s/rr)
print("warmup fh match:", mp.nstr(fhw - fhw_expect, 5))

# 12. bulk-branch transformed value and radial derivatives, t-dist d2 k1 b1,
#     r = 0.5 (below the knot 1): direct mpmath composition of the quintic
#     bulk profile with f(s) = ((d+kappa)/2) log(1+s^2).
def fh_bulk(r):
    r = mp.mpf(r)
    p = make_p(1)
    pr = sum(c * r**k for k, c in enumerate(p))
    dpr = sum(k * c * r**(k-1) for k, c in enumerate(p) if k >= 1)
    g = r * mp.exp(pr)            # c = sqrt(b) = 1
    gp = (1 + r * dpr) * mp.exp(pr)
    fg = mp.mpf(3)/2 * mp.log(1 + g**2)
    return fg - mp.log(gp) - (mp.log(g) - mp.log(r))

print("fh bulk r=0.5:", mp.nstr(fh_bulk(mp.mpf('0.5')), 25))
print("fh' bulk r=0.5:", mp.nstr(mp.diff(fh_bulk, mp.mpf('0.5')), 25))
print("fh'' bulk r=0.5:", mp.nstr(mp.diff(fh_bulk, mp.mpf('0.5'), 2), 25))

# 13. tail-branch second derivative at r = 2 (t-dist d2 k1 b1), via the
#     log-space composition F(u) = (3/2) log(1 + e^{2u}), u = r^2.
def fh_tail(r):
    r = mp.mpf(r)
    u = r**2
    F = mp.mpf(3)/2 * mp.log(1 + mp.exp(2*u))
    return F - (mp.log(2*r) + u) - (u - mp.log(r))

print("fh tail r=2:", mp.nstr(fh_tail(2), 25))
print("fh' tail r=2:", mp.nstr(mp.diff(fh_tail, mp.mpf(2)), 25))
print("fh'' tail r=2:", mp.nstr(mp.diff(fh_tail, mp.mpf(2), 2), 25))

# 14. radial moments of the t target d=2 kappa=3: density r (1+r^2)^{-5/2}
four = mp.quad(lambda r: r * (1 + r**2)**mp.mpf('-2.5'), [0, mp.inf])
mean = mp.quad(lambda r: r**2 * (1 + r**2)**mp.mpf('-2.5'), [0, mp.inf]) / four
tail5 = mp.quad(lambda r: r * (1 + r**2)**mp.mpf('-2.5'), [5, mp.inf]) / four
print("t d2k3 E|x|:", mp.nstr(mean, 25))
print("t d2k3 P(|x|>5):", mp.nstr(tail5, 25))
print("t d2k3 E|x|^2:", mp.nstr(mp.quad(lambda r: r**3 * (1 + r**2)**mp.mpf('-2.5'), [0, mp.inf]) / four, 25))

# 15. KL of two unscaled-t pairs in one dimension (for the divergence
#     preservation suite): f_a with kappa=2, f_b with kappa=4, d=1.
def t1d(kappa):
    e = mp.mpf(1 + kappa) / 2
    z = mp.quad(lambda x: (1 + x**2)**(-e), [-mp.inf, 0, mp.inf])
    return e, z

ea, za = t1d(2)
eb, zb = t1d(4)
kl = mp.quad(
    lambda x: (1 + x**2)**(-ea) / za * ((eb - ea) * mp.log(1 + x**2) + mp.log(zb) - mp.log(za)),
    [-mp.inf, 0, mp.inf],
)
print("KL t1d k2||k4:", mp.nstr(kl, 25))
