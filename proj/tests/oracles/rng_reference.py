"""Independent MT19937-64 + Box-Muller reference values for test_random.cpp.

Run: python3 rng_reference.py
"""
import math

NN, MM = 312, 156
MATRIX_A = 0xB5026F5AA96619E9
UM, LM = 0xFFFFFFFF80000000, 0x7FFFFFFF
MASK = (1 << 64) - 1


class MT64:
    def __init__(self, seed):
        self.mt = [0] * NN
        self.mt[0] = seed & MASK
        for i in range(1, NN):
            prev = self.mt[i - 1]
            self.mt[i] = (6364136223846793005 * (prev ^ (prev >> 62)) + i) & MASK
        self.mti = NN

    def next(self):
        if self.mti >= NN:
            mt = self.mt
            for i in range(NN):
                x = (mt[i] & UM) | (mt[(i + 1) % NN] & LM)
                xa = x >> 1
                if x & 1:
                    xa ^= MATRIX_A
                mt[i] = mt[(i + MM) % NN] ^ xa
            self.mti = 0
        x = self.mt[self.mti]
        self.mti += 1
        x ^= (x >> 29) & 0x5555555555555555
        x ^= (x << 17) & 0x71D67FFFEDA60000
        x ^= (x << 37) & 0xFFF7EEE000000000
        x ^= x >> 43
        return x & MASK


def uniform(g):
    return (g.next() >> 11) * 2.0 ** -53


def normals(g, count):
    out = []
    while len(out) < count:
        u1 = 1.0 - uniform(g)
        u2 = uniform(g)
        r = math.sqrt(-2.0 * math.log(u1))
        out += [r * math.cos(2 * math.pi * u2), r * math.sin(2 * math.pi * u2)]
    return out[:count]


if __name__ == "__main__":
    g = MT64(5489)
    for _ in range(9999):
        g.next()
    print("default 10000th:", g.next())
    g = MT64(42)
    print("bits seed 42:", [g.next() for _ in range(3)])
    g = MT64(7)
    print("uniform seed 7:", [repr(uniform(g)) for _ in range(4)])
    g = MT64(11)
    print("normal seed 11:", [repr(v) for v in normals(g, 5)])
