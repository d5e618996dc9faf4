#include "dropletlab/medium.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace dlab {

namespace {

// int_0^pi cos(p t) cos(q t) dt for non-negative integers.
double cos_cos_integral(int p, int q) {
  if (p != q) return 0.0;
  return (p == 0) ? pi : pi / 2.0;
}

// C(m, w) = int_{pi/2}^{3pi/2} cos(m (x - pi/2)) e^{i w x} dx for integer m, w.
cplx cos_times_exp(int m, int w) {
  // substitute t = x - pi/2
  const cplx i(0.0, 1.0);
  const cplx phase = std::exp(i * cplx(w * pi / 2.0, 0.0));
  auto exp_int = [&](int p) -> cplx {  // int_0^pi e^{i p t} dt
    if (p == 0) return cplx(pi, 0.0);
    return (std::exp(i * cplx(p * pi, 0.0)) - 1.0) / (i * cplx(double(p), 0.0));
  };
  // cos(mt) e^{iwt} = 1/2 (e^{i(w+m)t} + e^{i(w-m)t})
  return phase * 0.5 * (exp_int(w + m) + exp_int(w - m));
}

}  // namespace

MediumSpec::MediumSpec(double c0, std::vector<CosTerm> ts) : offset(c0), terms(std::move(ts)) {
  for (const auto& t : terms)
    for (int d = 0; d < 3; ++d)
      if (t.m[d] < 0) throw invalid_config("MediumSpec: negative mode index");
  scan_range();
}

void MediumSpec::scan_range() {
  if (is_zero()) {
    min_val_ = 0.0;
    max_abs_ = 0.0;
    return;
  }
  const int ng = 24;
  min_val_ = std::numeric_limits<double>::infinity();
  max_abs_ = 0.0;
  for (int i = 0; i < ng; ++i)
    for (int j = 0; j < ng; ++j)
      for (int k = 0; k < ng; ++k) {
        const Vector3d x(omega_lo + (i + 0.5) * pi / ng, omega_lo + (j + 0.5) * pi / ng,
                         omega_lo + (k + 0.5) * pi / ng);
        const double v = eval(x);
        min_val_ = std::min(min_val_, v);
        max_abs_ = std::max(max_abs_, std::abs(v));
      }
  if (min_val_ <= 0.0)
    throw invalid_config("MediumSpec: n^2 must stay positive (min on check grid = " +
                         format_double(min_val_) + ")");
}

double MediumSpec::eval(const Vector3d& x) const {
  double v = offset;
  for (const auto& t : terms) {
    double p = t.amp;
    for (int d = 0; d < 3; ++d) p *= std::cos(t.m[d] * (x[d] - omega_lo));
    v += p;
  }
  return v;
}

int MediumSpec::bandwidth() const {
  int b = 0;
  for (const auto& t : terms)
    for (int d = 0; d < 3; ++d) b = std::max(b, t.m[d]);
  return b;
}

Eigen::MatrixXd cosine_multiplier_1d(int n, int m) {
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const double nu = std::sqrt(((a == 0) ? 1.0 : 2.0) * ((b == 0) ? 1.0 : 2.0)) / pi;
      T(a, b) = nu * 0.5 * (cos_cos_integral(a + b, m) + cos_cos_integral(std::abs(a - b), m));
    }
  return T;
}

Eigen::VectorXcd MediumSpec::apply_n2(const ModeGrid& g, const Eigen::VectorXcd& u) const {
  Eigen::VectorXcd out = offset * u;
  const int n = g.n;
  for (const auto& term : terms) {
    // y = amp * (T1 (x) T2 (x) T3) u, one dimension at a time. Each T^(m) has
    // at most three nonzeros per row: b in {m-a, a-m, a+m}.
    Eigen::VectorXcd cur = u;
    for (int d = 0; d < 3; ++d) {
      const int m = term.m[d];
      Eigen::VectorXcd nxt = Eigen::VectorXcd::Zero(cur.size());
      if (m == 0) {
        nxt = cur;
      } else {
        const Eigen::MatrixXd T = cosine_multiplier_1d(n, m);
        // contract dimension d
        const int s_out = (d == 0) ? n * n : (d == 1) ? n : 1;
        for (int a = 0; a < n; ++a) {
          const int cand[3] = {m - a, a - m, a + m};
          for (int ci = 0; ci < 3; ++ci) {
            const int b = cand[ci];
            bool dup = false;
            for (int cj = 0; cj < ci; ++cj) dup = dup || (cand[cj] == b);
            if (dup || b < 0 || b >= n) continue;
            const double w = T(a, b);
            if (w == 0.0) continue;
            // iterate over the complementary dims
            if (d == 0) {
              for (int q = 0; q < n * n; ++q)
                nxt[static_cast<std::size_t>(a) * s_out + q] +=
                    w * cur[static_cast<std::size_t>(b) * s_out + q];
            } else if (d == 1) {
              for (int p = 0; p < n; ++p)
                for (int r = 0; r < n; ++r)
                  nxt[(static_cast<std::size_t>(p) * n + a) * n + r] +=
                      w * cur[(static_cast<std::size_t>(p) * n + b) * n + r];
            } else {
              for (int q = 0; q < n * n; ++q)
                nxt[static_cast<std::size_t>(q) * n + a] += w * cur[static_cast<std::size_t>(q) * n + b];
            }
          }
        }
      }
      cur.swap(nxt);
    }
    out += term.amp * cur;
  }
  return out;
}

Eigen::MatrixXd MediumSpec::n2_matrix(const ModeGrid& g) const {
  const std::size_t sz = g.size();
  Eigen::MatrixXd M = offset * Eigen::MatrixXd::Identity(sz, sz);
  const int n = g.n;
  for (const auto& term : terms) {
    const Eigen::MatrixXd T1 = cosine_multiplier_1d(n, term.m[0]);
    const Eigen::MatrixXd T2 = cosine_multiplier_1d(n, term.m[1]);
    const Eigen::MatrixXd T3 = cosine_multiplier_1d(n, term.m[2]);
    for (std::size_t r = 0; r < sz; ++r) {
      const Index3 ka = g.unflat(r);
      for (std::size_t c = 0; c < sz; ++c) {
        const Index3 kb = g.unflat(c);
        const double v = T1(ka[0], kb[0]) * T2(ka[1], kb[1]) * T3(ka[2], kb[2]);
        if (v != 0.0) M(r, c) += term.amp * v;
      }
    }
  }
  return M;
}

cplx MediumSpec::fourier_chi_omega(const Index3& l) const {
  // F(n^2 chi_Omega)(l) = (2pi)^-3 int_Omega n^2(x) e^{-i l.x} dx
  const double scale = 1.0 / (cell_period * cell_period * cell_period);
  cplx acc = offset * cos_times_exp(0, -l[0]) * cos_times_exp(0, -l[1]) * cos_times_exp(0, -l[2]);
  for (const auto& t : terms) {
    cplx p = t.amp;
    for (int d = 0; d < 3; ++d) p *= cos_times_exp(t.m[d], -l[d]);
    acc += p;
  }
  return scale * acc;
}

std::uint64_t MediumSpec::hash() const {
  std::uint64_t hsh = fnv1a64(&offset, sizeof offset);
  for (const auto& t : terms) {
    hsh = fnv1a64(&t.amp, sizeof t.amp, hsh);
    hsh = fnv1a64(t.m.data(), sizeof t.m, hsh);
  }
  return hsh;
}

std::string MediumSpec::describe() const {
  std::ostringstream os;
  os << format_double(offset);
  for (const auto& t : terms)
    os << " + " << format_double(t.amp) << "*cos[" << t.m[0] << "," << t.m[1] << "," << t.m[2]
       << "]";
  return os.str();
}

}  // namespace dlab
