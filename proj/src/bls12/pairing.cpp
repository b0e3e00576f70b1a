#include "permadid/bls12/pairing.hpp"

namespace permadid::bls12 {

namespace {

/// Doubling step: advances t to 2t and returns the tangent line at the old t
/// evaluated at p, as sparse Fp12 components (1, v, v*w). Lines are computed
/// up to nonzero scalar factors, which the final exponentiation eliminates.
Fp12 dbl_step(G2& t, const G1Affine& p) {
    Fp2 a = t.X.square();
    Fp2 b = t.Y.square();
    Fp2 c = b.square();
    Fp2 zz = t.Z.square();
    Fp2 d = ((t.X + b).square() - a - c).doubled();
    Fp2 e = a + a + a;
    Fp2 f = e.square();
    Fp2 x3 = f - d.doubled();
    Fp2 y3 = e * (d - x3) - c.doubled().doubled().doubled();
    Fp2 z3 = (t.Y + t.Z).square() - b - zz;  // 2YZ

    Fp2 l0 = e * t.X - b.doubled();            // 3X^3 - 2Y^2
    Fp2 lv = -(e * zz).mul_by_fp(p.x);         // -3X^2 Z^2 xP
    Fp2 lvw = (z3 * zz).mul_by_fp(p.y);        // 2YZ^3 yP

    t = G2{x3, y3, z3};
    return Fp12::from_line(l0, lv, lvw);
}

/// Addition step: advances t to t + q and returns the chord line through the
/// old t and q evaluated at p.
Fp12 add_step(G2& t, const G2Affine& q, const G1Affine& p) {
    Fp2 zz = t.Z.square();
    Fp2 u2 = q.x * zz;
    Fp2 s2 = q.y * t.Z * zz;
    Fp2 h = u2 - t.X;
    Fp2 theta = t.Y - s2;
    Fp2 zh = t.Z * h;

    Fp2 l0 = theta * q.x + q.y * zh;
    Fp2 lv = (-theta).mul_by_fp(p.x);
    Fp2 lvw = (-zh).mul_by_fp(p.y);

    Fp2 hh = h.square();
    Fp2 i = hh.doubled().doubled();
    Fp2 j = h * i;
    Fp2 rr = (s2 - t.Y).doubled();
    Fp2 v = t.X * i;
    Fp2 x3 = rr.square() - j - v.doubled();
    Fp2 y3 = rr * (v - x3) - (t.Y * j).doubled();
    Fp2 z3 = (t.Z + h).square() - zz - hh;  // 2ZH

    t = G2{x3, y3, z3};
    return Fp12::from_line(l0, lv, lvw);
}

Fp12 exp_by_neg_x(const Fp12& g) {
    Fp12 acc = Fp12::one();
    bool started = false;
    for (int bit = 63; bit >= 0; --bit) {
        if (started) acc = acc.square();
        if ((kAbsX >> bit) & 1) {
            if (started)
                acc *= g;
            else {
                acc = g;
                started = true;
            }
        }
    }
    // x is negative; in the cyclotomic subgroup conjugation inverts
    return acc.conjugate();
}

}  // namespace

Fp12 miller_loop(const std::vector<std::pair<G1Affine, G2Affine>>& pairs) {
    struct State {
        G1Affine p;
        G2Affine q;
        G2 t;
    };
    std::vector<State> st;
    st.reserve(pairs.size());
    for (const auto& [p, q] : pairs) {
        if (p.infinity || q.infinity) continue;
        st.push_back({p, q, G2::from_affine(q)});
    }

    Fp12 f = Fp12::one();
    for (int bit = 62; bit >= 0; --bit) {
        f = f.square();
        for (auto& s : st) f *= dbl_step(s.t, s.p);
        if ((kAbsX >> bit) & 1)
            for (auto& s : st) f *= add_step(s.t, s.q, s.p);
    }
    // the curve parameter is negative: invert the loop output, which after
    // the final exponentiation is conjugation
    return f.conjugate();
}

Fp12 final_exp_easy(const Fp12& f) {
    Fp12 t0 = f.conjugate();        // f^(p^6)
    Fp12 t1 = f.inverse();
    Fp12 g = t0 * t1;               // f^(p^6 - 1)
    return g.frobenius().frobenius() * g;  // ^(p^2 + 1)
}

Fp12 final_exp_hard(const Fp12& f) {
    Fp12 t1 = f.square().conjugate();
    Fp12 t3 = exp_by_neg_x(f);
    Fp12 t4 = t3.square();
    Fp12 t5 = t1 * t3;
    t1 = exp_by_neg_x(t5);
    Fp12 t0 = exp_by_neg_x(t1);
    Fp12 t6 = exp_by_neg_x(t0);
    t6 *= t4;
    t4 = exp_by_neg_x(t6);
    t5 = t5.conjugate();
    t4 *= t5 * f;
    t5 = f.conjugate();
    t1 *= f;
    t1 = t1.frobenius().frobenius().frobenius();
    t6 *= t5;
    t6 = t6.frobenius();
    t3 *= t0;
    t3 = t3.frobenius().frobenius();
    t3 *= t1;
    t3 *= t6;
    return t3 * t4;
}

Fp12 final_exponentiation(const Fp12& f) { return final_exp_hard(final_exp_easy(f)); }

Fp12 pairing(const G1Affine& p, const G2Affine& q) {
    return final_exponentiation(miller_loop({{p, q}}));
}

bool pairing_product_is_one(const std::vector<std::pair<G1Affine, G2Affine>>& pairs) {
    return final_exponentiation(miller_loop(pairs)).is_one();
}

}  // namespace permadid::bls12
