#include "predicates.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace spudd::predicates {

namespace {

std::atomic<long> g_orient_exact{0};
std::atomic<long> g_power_exact{0};

// Double with a rigorous bound on its absolute error. Every operation adds the
// rounding error of its own result plus the smallest subnormal, which covers
// underflow.
struct Fe {
  double v;
  double e;
};

constexpr double kRound = 0x1p-52;
constexpr double kTiny = std::numeric_limits<double>::denorm_min();

inline Fe exact(double v) { return {v, 0.0}; }
inline Fe operator+(Fe a, Fe b) {
  const double v = a.v + b.v;
  return {v, a.e + b.e + kRound * std::abs(v) + kTiny};
}
inline Fe operator-(Fe a, Fe b) {
  const double v = a.v - b.v;
  return {v, a.e + b.e + kRound * std::abs(v) + kTiny};
}
inline Fe operator*(Fe a, Fe b) {
  const double v = a.v * b.v;
  return {v, std::abs(a.v) * b.e + std::abs(b.v) * a.e + a.e * b.e + kRound * std::abs(v) + kTiny};
}

// Sign when certain, 0 when the filter cannot decide. The margin absorbs the
// rounding in the error terms themselves.
inline int certain_sign(Fe x) {
  const double bound = x.e * (1.0 + 1e-12);
  if (x.v > bound) return 1;
  if (x.v < -bound) return -1;
  return 0;
}

template <class T>
T det3(const T m[3][3]) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

template <class T>
T det4(const T m[4][4]) {
  // Expansion by 2x2 minors of the first two rows.
  const T s0 = m[0][0] * m[1][1] - m[1][0] * m[0][1];
  const T s1 = m[0][0] * m[1][2] - m[1][0] * m[0][2];
  const T s2 = m[0][0] * m[1][3] - m[1][0] * m[0][3];
  const T s3 = m[0][1] * m[1][2] - m[1][1] * m[0][2];
  const T s4 = m[0][1] * m[1][3] - m[1][1] * m[0][3];
  const T s5 = m[0][2] * m[1][3] - m[1][2] * m[0][3];
  const T c5 = m[2][2] * m[3][3] - m[3][2] * m[2][3];
  const T c4 = m[2][1] * m[3][3] - m[3][1] * m[2][3];
  const T c3 = m[2][1] * m[3][2] - m[3][1] * m[2][2];
  const T c2 = m[2][0] * m[3][3] - m[3][0] * m[2][3];
  const T c1 = m[2][0] * m[3][2] - m[3][0] * m[2][2];
  const T c0 = m[2][0] * m[3][1] - m[3][0] * m[2][1];
  return s0 * c5 - s1 * c4 + s2 * c3 + s3 * c2 - s4 * c1 + s5 * c0;
}

// Exact arithmetic on nonoverlapping expansions: a value is the exact sum of
// its components, stored in increasing magnitude, after Shewchuk's scheme.
class Expansion {
 public:
  static constexpr int kCapacity = 256;

  Expansion() : n_(1) { t_[0] = 0.0; }
  explicit Expansion(double x) : n_(1) { t_[0] = x; }
  Expansion(const Expansion& o) : n_(o.n_) { std::copy(o.t_, o.t_ + o.n_, t_); }
  Expansion& operator=(const Expansion& o) {
    n_ = o.n_;
    std::copy(o.t_, o.t_ + o.n_, t_);
    return *this;
  }

  static Expansion diff(double a, double b) {
    Expansion e;
    const double x = a - b;
    const double bv = a - x;
    const double av = x + bv;
    const double y = (a - av) + (bv - b);
    e.n_ = 0;
    if (y != 0.0) e.t_[e.n_++] = y;
    e.t_[e.n_++] = x;
    return e;
  }

  int sign() const { return t_[n_ - 1] > 0.0 ? 1 : (t_[n_ - 1] < 0.0 ? -1 : 0); }
  // Nearest double, up to a couple of ulps.
  double estimate() const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s += t_[i];
    return s;
  }

  friend Expansion operator+(const Expansion& a, const Expansion& b) {
    Expansion h = a;
    Expansion tmp;
    for (int i = 0; i < b.n_; ++i) {
      if (b.t_[i] == 0.0) continue;
      grow(h, b.t_[i], tmp);
      std::swap(h, tmp);
    }
    return h.compressed();
  }
  friend Expansion operator-(const Expansion& a, const Expansion& b) { return a + (-b); }
  Expansion operator-() const {
    Expansion r = *this;
    for (int i = 0; i < n_; ++i) r.t_[i] = -r.t_[i];
    return r;
  }
  friend Expansion operator*(const Expansion& a, const Expansion& b) {
    Expansion sum;
    Expansion part;
    for (int j = 0; j < b.n_; ++j) {
      if (b.t_[j] == 0.0) continue;
      scale(a, b.t_[j], part);
      sum = sum + part;
    }
    return sum;
  }

 private:
  void push(double x) {
    if (n_ >= kCapacity) throw std::overflow_error("expansion capacity exceeded");
    t_[n_++] = x;
  }

  static void two_sum(double a, double b, double& x, double& y) {
    x = a + b;
    const double bv = x - a;
    const double av = x - bv;
    y = (a - av) + (b - bv);
  }
  static void fast_two_sum(double a, double b, double& x, double& y) {
    x = a + b;
    y = b - (x - a);
  }

  static void grow(const Expansion& e, double b, Expansion& h) {
    h.n_ = 0;
    double q = b;
    for (int i = 0; i < e.n_; ++i) {
      double qn, hh;
      two_sum(q, e.t_[i], qn, hh);
      q = qn;
      if (hh != 0.0) h.push(hh);
    }
    if (q != 0.0 || h.n_ == 0) h.push(q);
  }

  static void scale(const Expansion& e, double b, Expansion& h) {
    h.n_ = 0;
    double q = e.t_[0] * b;
    double hh = std::fma(e.t_[0], b, -q);
    if (hh != 0.0) h.push(hh);
    for (int i = 1; i < e.n_; ++i) {
      const double p1 = e.t_[i] * b;
      const double p0 = std::fma(e.t_[i], b, -p1);
      double sum;
      two_sum(q, p0, sum, hh);
      if (hh != 0.0) h.push(hh);
      fast_two_sum(p1, sum, q, hh);
      if (hh != 0.0) h.push(hh);
    }
    if (q != 0.0 || h.n_ == 0) h.push(q);
  }

  Expansion compressed() const {
    Expansion h;
    h.n_ = n_;
    int bottom = n_ - 1;
    double q = t_[bottom];
    for (int i = n_ - 2; i >= 0; --i) {
      double qn, r;
      fast_two_sum(q, t_[i], qn, r);
      if (r != 0.0) {
        h.t_[bottom--] = qn;
        q = r;
      } else {
        q = qn;
      }
    }
    int top = 0;
    for (int i = bottom + 1; i < n_; ++i) {
      double qn, r;
      fast_two_sum(h.t_[i], q, qn, r);
      if (r != 0.0) h.t_[top++] = r;
      q = qn;
    }
    h.t_[top] = q;
    h.n_ = top + 1;
    return h;
  }

  int n_;
  double t_[kCapacity];
};

int orient_exact(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  ++g_orient_exact;
  Expansion m[3][3];
  const Vec3* rows[3] = {&b, &c, &d};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) m[i][k] = Expansion::diff((*rows[i])[k], a[k]);
  return det3(m).sign();
}

// det of rows (p_i - q, |p_i - q|^2 - r_i^2 + r_q^2), i = 0..3. Adding 2 q.(p_i - q)
// to the last column gives the lifted coordinate difference, and that term is
// a combination of the other columns, so the determinant is the same.
int power_det_filtered(const WPoint t[4], const WPoint& q) {
  Fe m[4][4];
  const Fe rq2 = exact(q.r) * exact(q.r);
  for (int i = 0; i < 4; ++i) {
    const Fe dx = exact(t[i].p->x()) - exact(q.p->x());
    const Fe dy = exact(t[i].p->y()) - exact(q.p->y());
    const Fe dz = exact(t[i].p->z()) - exact(q.p->z());
    m[i][0] = dx;
    m[i][1] = dy;
    m[i][2] = dz;
    m[i][3] = dx * dx + dy * dy + dz * dz - exact(t[i].r) * exact(t[i].r) + rq2;
  }
  return certain_sign(det4(m));
}

int power_det_exact(const WPoint t[4], const WPoint& q) {
  ++g_power_exact;
  const Expansion rq(q.r);
  const Expansion rq2 = rq * rq;
  Expansion m[4][4];
  for (int i = 0; i < 4; ++i) {
    for (int k = 0; k < 3; ++k) m[i][k] = Expansion::diff((*t[i].p)[k], (*q.p)[k]);
    const Expansion ri(t[i].r);
    m[i][3] = m[i][0] * m[i][0] + m[i][1] * m[i][1] + m[i][2] * m[i][2] - ri * ri + rq2;
  }
  return det4(m).sign();
}

}  // namespace

Vec3 power_center_exact(const Vec3 p[4], const double r[4]) {
  Expansion m[3][3], rhs[3];
  const Expansion r0(r[0]);
  const Expansion r02 = r0 * r0;
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) m[i][k] = Expansion::diff(p[i + 1][k], p[0][k]);
    const Expansion ri(r[i + 1]);
    rhs[i] = m[i][0] * m[i][0] + m[i][1] * m[i][1] + m[i][2] * m[i][2] - ri * ri + r02;
  }
  // 2 m (c - p0) = rhs, by Cramer's rule.
  const double den = 2.0 * det3(m).estimate();
  Vec3 c = p[0];
  for (int k = 0; k < 3; ++k) {
    Expansion mk[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) mk[i][j] = j == k ? rhs[i] : m[i][j];
    c[k] += det3(mk).estimate() / den;
  }
  return c;
}

int orient3d(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  Fe m[3][3];
  const Vec3* rows[3] = {&b, &c, &d};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) m[i][k] = exact((*rows[i])[k]) - exact(a[k]);
  const int s = certain_sign(det3(m));
  return s != 0 ? s : orient_exact(a, b, c, d);
}

int power_side(const WPoint t[4], const WPoint& q) {
  int s = power_det_filtered(t, q);
  if (s == 0) s = power_det_exact(t, q);
  if (s != 0) return s;

  // Degenerate: with rows P0..P4 = t[0..3], q of the 5x5 matrix [x y z lambda 1],
  // raising weight i by a positive infinitesimal changes the determinant by
  // (-1)^(i+1) orient(others) times that amount, up to a positive factor. The
  // largest perturbation decides; fall through while its coefficient vanishes.
  const WPoint* pts[5] = {&t[0], &t[1], &t[2], &t[3], &q};
  int order[5] = {0, 1, 2, 3, 4};
  std::sort(order, order + 5, [&](int a, int b) { return pts[a]->priority > pts[b]->priority; });
  for (int i : order) {
    const Vec3* o[4];
    int n = 0;
    for (int k = 0; k < 5; ++k)
      if (k != i) o[n++] = pts[k]->p;
    const int os = orient3d(*o[0], *o[1], *o[2], *o[3]);
    if (os != 0) return (i % 2 == 1) ? os : -os;
  }
  return 1;  // five coplanar points; cannot arise for a proper tetrahedron
}

Stats stats() { return {g_orient_exact.load(), g_power_exact.load()}; }

}  // namespace spudd::predicates
