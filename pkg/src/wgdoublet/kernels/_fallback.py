"""Reference implementations of the compiled kernels (numpy + plain loops)."""
import numpy as np


def pole_sum(f, centers, fwhms, amps, baseline, sign):
    f = np.asarray(f, dtype=np.float64)
    h = 0.5 * np.asarray(fwhms, dtype=np.float64)
    x = f[:, None] - np.asarray(centers, dtype=np.float64)[None, :]
    terms = np.asarray(amps, dtype=np.complex128)[None, :] * h / (1j * x + h)
    return baseline + sign * terms.sum(axis=1)


def pole_sum_abs(f, centers, fwhms, amps, baseline, sign):
    return np.abs(pole_sum(f, centers, fwhms, amps, baseline, sign))


def peak_scan(y, min_prominence):
    y = [float(v) for v in y]
    n = len(y)
    idx, prom = [], []
    i = 1
    while i < n - 1:
        if y[i] > y[i - 1]:
            start = k = i
            while k + 1 < n and y[k + 1] == y[i]:
                k += 1
            if k + 1 < n and y[k + 1] < y[i]:
                top = y[start]
                left_min = top
                j = start - 1
                while j >= 0 and y[j] <= top:
                    left_min = min(left_min, y[j])
                    j -= 1
                right_min = top
                j = k + 1
                while j < n and y[j] <= top:
                    right_min = min(right_min, y[j])
                    j += 1
                p = top - max(left_min, right_min)
                if p >= min_prominence:
                    idx.append(start)
                    prom.append(p)
            i = k + 1
        else:
            i += 1
    return np.asarray(idx, dtype=np.intp), np.asarray(prom, dtype=np.float64)
