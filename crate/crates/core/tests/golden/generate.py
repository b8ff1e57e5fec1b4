# Independent construction of small reference matrices with numpy.
import numpy as np
N = 2
d = N + 1
def lower(n):
    m = np.zeros((n, n))
    for k in range(1, n):
        m[k-1, k] = np.sqrt(k)
    return m
I = np.eye(d)
a = np.kron(lower(d), I).astype(complex)
b = np.kron(I, lower(d)).astype(complex)
m = c = hbar = 1.0
wt = 1.0 - 0.5 * 1.0  # omega = 1, B = 1
ell = np.sqrt(hbar / (m * abs(wt)))
z = ell * (a + b.conj().T)
zbar = z.conj().T
pz = 0.5j * hbar / ell * (a.conj().T - b)
pzbar = pz.conj().T
p2 = 4 * pz @ pzbar
U = 2 * c * pz + 1j * m * wt * c * zbar
n = d * d
h0 = np.block([[m*c*c*np.eye(n), U], [U.conj().T, -m*c*c*np.eye(n)]])
def fmt(x):
    s = "%.16e" % x
    mant, e = s.split("e")
    return mant + "e" + str(int(e))
def dump(mat):
    lines = []
    for row in mat:
        cells = []
        for zz in row:
            re, im = zz.real + 0.0, zz.imag + 0.0
            sign = "-" if np.signbit(im) else "+"
            cells.append(fmt(re) + sign + fmt(abs(im)) + "i")
        lines.append(" ".join(cells))
    return "\n".join(lines) + "\n"
open("h0_cutoff2.txt", "w").write(dump(h0))
open("p2_cutoff2.txt", "w").write(dump(p2))
