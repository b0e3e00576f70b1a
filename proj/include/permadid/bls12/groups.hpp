#pragma once

#include <array>
#include <optional>

#include "permadid/bls12/fp_ext.hpp"
#include "permadid/bytes.hpp"

namespace permadid::bls12 {

template <class F>
struct AffinePoint {
    F x{};
    F y{};
    bool infinity = true;

    static AffinePoint identity() { return AffinePoint{}; }
    static AffinePoint from_xy(const F& x, const F& y) { return {x, y, false}; }

    bool operator==(const AffinePoint& o) const {
        if (infinity || o.infinity) return infinity == o.infinity;
        return x == o.x && y == o.y;
    }
};

/// Jacobian projective point on y^2 = x^3 + b (a = 0). Z == 0 encodes the
/// identity. Group operations are branch-variable; this library does not aim
/// for constant-time execution.
template <class F>
struct JacobianPoint {
    F X{};
    F Y{};
    F Z{};

    static JacobianPoint identity() {
        return {F::zero(), F::one(), F::zero()};
    }

    static JacobianPoint from_affine(const AffinePoint<F>& a) {
        if (a.infinity) return identity();
        return {a.x, a.y, F::one()};
    }

    bool is_identity() const { return Z.is_zero(); }

    AffinePoint<F> to_affine() const {
        if (is_identity()) return AffinePoint<F>::identity();
        F zi = Z.inverse();
        F zi2 = zi.square();
        return AffinePoint<F>::from_xy(X * zi2, Y * zi2 * zi);
    }

    JacobianPoint operator-() const { return {X, -Y, Z}; }

    JacobianPoint doubled() const {
        if (is_identity()) return *this;
        F a = X.square();
        F b = Y.square();
        F c = b.square();
        F d = ((X + b).square() - a - c).doubled();
        F e = a + a + a;
        F f = e.square();
        F x3 = f - d.doubled();
        F y3 = e * (d - x3) - c.doubled().doubled().doubled();
        F z3 = (Y * Z).doubled();
        return {x3, y3, z3};
    }

    JacobianPoint operator+(const JacobianPoint& o) const {
        if (is_identity()) return o;
        if (o.is_identity()) return *this;
        F z1z1 = Z.square();
        F z2z2 = o.Z.square();
        F u1 = X * z2z2;
        F u2 = o.X * z1z1;
        F s1 = Y * o.Z * z2z2;
        F s2 = o.Y * Z * z1z1;
        F h = u2 - u1;
        F rr = (s2 - s1).doubled();
        if (h.is_zero()) {
            if (rr.is_zero()) return doubled();
            return identity();
        }
        F i = h.doubled().square();
        F j = h * i;
        F v = u1 * i;
        F x3 = rr.square() - j - v.doubled();
        F y3 = rr * (v - x3) - (s1 * j).doubled();
        F z3 = ((Z + o.Z).square() - z1z1 - z2z2) * h;
        return {x3, y3, z3};
    }

    JacobianPoint operator-(const JacobianPoint& o) const { return *this + (-o); }
    JacobianPoint& operator+=(const JacobianPoint& o) { return *this = *this + o; }

    /// Scalar multiplication by a big-endian byte string (any length).
    JacobianPoint mul_bytes(const uint8_t* scalar, size_t len) const {
        JacobianPoint acc = identity();
        for (size_t i = 0; i < len; ++i) {
            for (int bit = 7; bit >= 0; --bit) {
                acc = acc.doubled();
                if ((scalar[i] >> bit) & 1) acc += *this;
            }
        }
        return acc;
    }

    JacobianPoint mul(const Fr& k) const {
        auto bytes = k.to_bytes();
        return mul_bytes(bytes.data(), bytes.size());
    }

    bool eq(const JacobianPoint& o) const {
        if (is_identity() || o.is_identity()) return is_identity() == o.is_identity();
        F z1z1 = Z.square();
        F z2z2 = o.Z.square();
        if (X * z2z2 != o.X * z1z1) return false;
        return Y * z2z2 * o.Z == o.Y * z1z1 * Z;
    }
};

using G1Affine = AffinePoint<Fp>;
using G2Affine = AffinePoint<Fp2>;
using G1 = JacobianPoint<Fp>;
using G2 = JacobianPoint<Fp2>;

const Fp& g1_coeff_b();   // 4
const Fp2& g2_coeff_b();  // 4(1+u)
const G1& g1_generator();
const G2& g2_generator();

/// Big-endian byte form of the group order r, for subgroup checks.
const Bytes& fr_order_bytes();

bool g1_on_curve(const G1Affine& p);
bool g2_on_curve(const G2Affine& p);
bool g1_in_subgroup(const G1& p);
bool g2_in_subgroup(const G2& p);

/// Compressed serialization, 48 bytes for G1 and 96 for G2. The leading byte
/// carries flags: 0x80 compressed, 0x40 infinity, 0x20 y is the
/// lexicographically larger root.
std::array<uint8_t, 48> g1_to_compressed(const G1Affine& p);
std::array<uint8_t, 96> g2_to_compressed(const G2Affine& p);
std::optional<G1Affine> g1_from_compressed(const uint8_t* data);
std::optional<G2Affine> g2_from_compressed(const uint8_t* data);

/// RFC 9380 expand_message_xmd over SHA-256.
Bytes expand_message_xmd(const Bytes& msg, const Bytes& dst, size_t len);

/// Deterministic hash to a G1 subgroup element: try-and-increment over
/// candidate x coordinates followed by cofactor clearing. Never returns
/// the identity.
G1 hash_to_g1(const Bytes& msg, const Bytes& dst);

}  // namespace permadid::bls12
