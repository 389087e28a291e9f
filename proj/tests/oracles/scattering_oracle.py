"""Direct-space reference for the orientation-averaged scattering
coefficients on a small raster. Filters are built from their definition
(periodized Morlet with zero-mean correction, real spectrum with unit peak;
Gaussian low-pass with unit DC gain) and every convolution is evaluated as an
explicit circular sum over all kernel offsets, without FFT products."""
import numpy as np

J, L = 5, 4
SIZE = 64


def gabor(n, sigma, theta, xi, slant):
    c, s = np.cos(theta), np.sin(theta)
    rot = np.array([[c, -s], [s, c]])
    inv_cov = rot @ np.diag([1.0, slant**2]) @ rot.T / (2 * sigma**2)
    coords = np.arange(n)
    coords = np.where(coords <= n // 2, coords, coords - n)
    out = np.zeros((n, n), dtype=complex)
    for ey in range(-2, 3):
        for ex in range(-2, 3):
            y = coords[:, None] + ey * n
            x = coords[None, :] + ex * n
            q = inv_cov[0, 0] * x * x + 2 * inv_cov[0, 1] * x * y + inv_cov[1, 1] * y * y
            out += np.exp(-q) * np.exp(1j * xi * (x * c + y * s))
    return out


def morlet_kernel(n, j, l):
    sigma = 0.8 * 2**j
    xi = 0.75 * np.pi / 2**j
    theta = l * np.pi / L
    wave = gabor(n, sigma, theta, xi, 4.0 / L)
    env = gabor(n, sigma, theta, 0.0, 4.0 / L)
    wave = wave - wave.sum() / env.sum() * env
    spec = np.fft.fft2(wave).real
    spec[0, 0] = 0.0
    spec /= np.abs(spec).max()
    return np.fft.ifft2(spec)


def lowpass_kernel(n):
    spec = np.fft.fft2(gabor(n, 0.8 * 2 ** (J - 1), 0.0, 0.0, 1.0)).real
    spec /= spec[0, 0]
    return np.fft.ifft2(spec)


def circular_conv(x, k):
    out = np.zeros(x.shape, dtype=complex)
    n = x.shape[0]
    for dy in range(n):
        for dx in range(n):
            w = k[dy, dx]
            if w != 0:
                out += w * np.roll(np.roll(x, dy, axis=0), dx, axis=1)
    return out


def test_image(n):
    r = np.arange(n)[:, None].astype(float)
    c = np.arange(n)[None, :].astype(float)
    return np.sin(0.3 * r) + np.cos(0.7 * c + 0.2 * r) + ((r * 31 + c * 17) % 11) / 10.0


def scatter(x):
    n = x.shape[0]
    psi = [[morlet_kernel(n, j, l) for l in range(L)] for j in range(J)]
    phi = lowpass_kernel(n)
    s0 = circular_conv(x, phi).real.mean()
    s1 = np.zeros(J)
    s2 = {}
    first = np.zeros((J, L))
    for j1 in range(J):
        for l1 in range(L):
            u1 = np.abs(circular_conv(x, psi[j1][l1]))
            v = circular_conv(u1, phi).real.mean()
            first[j1, l1] = v
            s1[j1] += v / L
            for j2 in range(j1 + 1, J):
                for l2 in range(L):
                    u2 = np.abs(circular_conv(u1, psi[j2][l2]))
                    s2[(j1, j2)] = s2.get((j1, j2), 0.0) + circular_conv(u2, phi).real.mean() / L**2
    return s0, s1, [s2[k] for k in sorted(s2)], first


if __name__ == "__main__":
    n = SIZE
    print("psi norms (l=0):", [repr(float(np.sqrt((np.abs(morlet_kernel(n, j, 0)) ** 2).sum()))) for j in range(J)])
    print("phi min spatial:", repr(float(lowpass_kernel(n).real.min())))
    s0, s1, s2, _ = scatter(test_image(n))
    print("coeffs:", ", ".join(repr(float(v)) for v in [s0, *s1, *s2]))
    c = np.arange(n)[None, :].astype(float)
    stripes = np.cos(2 * np.pi * 12 * c / n) * np.ones((n, 1))
    psi = [[morlet_kernel(n, j, l) for l in range(L)] for j in range(J)]
    first = np.array([[np.abs(circular_conv(stripes, psi[j][l])).mean() for l in range(L)] for j in range(J)])
    print("sinusoid first order argmax (j, l):", np.unravel_index(first.argmax(), first.shape))
    print(np.array2string(first, precision=6))
