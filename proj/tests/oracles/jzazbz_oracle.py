"""Reference sRGB -> JzAzBz conversion (Safdar et al. 2017 constants) and
gamut-range scan. Values printed here are frozen in the C++ unit tests."""
import numpy as np

M_RGB_XYZ = np.array([[0.4124564, 0.3575761, 0.1804375],
                      [0.2126729, 0.7151522, 0.0721750],
                      [0.0193339, 0.1191920, 0.9503041]])
B, G = 1.15, 0.66
M_LMS = np.array([[0.41478972, 0.579999, 0.0146480],
                  [-0.2015100, 1.120649, 0.0531008],
                  [-0.0166008, 0.264800, 0.6684799]])
M_IAB = np.array([[0.5, 0.5, 0.0],
                  [3.524000, -4.066708, 0.542708],
                  [0.199076, 1.096799, -1.295875]])
C1, C2, C3 = 3424 / 2**12, 2413 / 2**7, 2392 / 2**7
N, P = 2610 / 2**14, 1.7 * 2523 / 2**5
D, D0 = -0.56, 1.6295499532821566e-11
WHITE_NITS = 100.0


def eotf(code):
    c = np.asarray(code, dtype=np.float64) / 255.0
    return np.where(c <= 0.04045, c / 12.92, ((c + 0.055) / 1.055) ** 2.4)


def jzazbz(rgb):
    rgb = np.atleast_2d(np.asarray(rgb, dtype=np.float64))
    lin = eotf(rgb)
    xyz = lin @ M_RGB_XYZ.T * WHITE_NITS
    x, y, z = xyz[:, 0], xyz[:, 1], xyz[:, 2]
    xp = B * x - (B - 1) * z
    yp = G * y - (G - 1) * x
    lms = np.stack([xp, yp, z], axis=1) @ M_LMS.T
    lms = np.maximum(lms, 0.0)
    t = (lms / 10000.0) ** N
    lms_p = ((C1 + C2 * t) / (1 + C3 * t)) ** P
    iab = lms_p @ M_IAB.T
    iz, az, bz = iab[:, 0], iab[:, 1], iab[:, 2]
    jz = (1 + D) * iz / (1 + D * iz) - D0
    return np.stack([jz, az, bz], axis=1)


if __name__ == "__main__":
    np.set_printoptions(precision=17)
    print("eotf(128) =", repr(float(eotf(128))))
    for c in [(0, 0, 0), (255, 255, 255), (255, 0, 0), (0, 128, 255), (12, 200, 77), (128, 128, 128)]:
        print(c, [repr(float(v)) for v in jzazbz(c)[0]])
    lin = eotf(np.array([0, 255, 0]))
    print("luminance green", repr(float(lin @ np.array([0.2126729, 0.7151522, 0.0721750]))))
    lo = np.full(3, np.inf)
    hi = np.full(3, -np.inf)
    codes = np.arange(256)
    for r in range(256):
        g, b = np.meshgrid(codes, codes, indexing="ij")
        px = np.stack([np.full(g.size, r), g.ravel(), b.ravel()], axis=1)
        v = jzazbz(px)
        lo = np.minimum(lo, v.min(axis=0))
        hi = np.maximum(hi, v.max(axis=0))
    print("ranges", [repr(float(x)) for x in lo], [repr(float(x)) for x in hi])
