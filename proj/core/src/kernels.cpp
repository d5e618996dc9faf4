#include "dropletlab/kernels.hpp"

#include <cmath>
#include <limits>

namespace dlab {

namespace {

constexpr double coincident_tol = 1e-13;

// Is t (>= 0) within tol of an integer expressible as a sum of three squares?
bool near_lattice_value(double t, double tol) {
  const int lo = std::max(0, static_cast<int>(std::floor(t - tol)));
  const int hi = static_cast<int>(std::ceil(t + tol));
  for (int v = lo; v <= hi; ++v) {
    if (std::abs(t - v) > tol) continue;
    int w = v;
    while (w % 4 == 0 && w > 0) w /= 4;
    if (w % 8 != 7) return true;
  }
  return false;
}

struct DimOffsets {
  std::vector<double> val;
  std::vector<char> direct;  // true for the unreflected m = 0 offset
};

DimOffsets dim_offsets(double x, double y, int M) {
  DimOffsets o;
  o.val.reserve(2 * (2 * M + 1));
  o.direct.reserve(2 * (2 * M + 1));
  for (int m = -M; m <= M; ++m) {
    o.val.push_back(y + 2.0 * pi * m - x);
    o.direct.push_back(m == 0);
    o.val.push_back(pi - y + 2.0 * pi * m - x);
    o.direct.push_back(false);
  }
  return o;
}

// Sum of e^{-P r}/(4 pi r) over the Neumann image lattice of y seen from x.
// The direct (unreflected, m = 0) image is replaced by (e^{-P r}-1)/(4 pi r)
// when subtract_self_free is set; that combination stays bounded as x -> y.
double image_kernel(const Vector3d& x, const Vector3d& y, double P, int M,
                    bool subtract_self_free) {
  const double rcut2 = (34.0 / P) * (34.0 / P);
  const DimOffsets o1 = dim_offsets(x[0], y[0], M);
  const DimOffsets o2 = dim_offsets(x[1], y[1], M);
  const DimOffsets o3 = dim_offsets(x[2], y[2], M);
  double s = 0.0;
  for (std::size_t i1 = 0; i1 < o1.val.size(); ++i1) {
    const double d1 = o1.val[i1];
    const double d1sq = d1 * d1;
    if (d1sq > rcut2 && !o1.direct[i1]) continue;
    for (std::size_t i2 = 0; i2 < o2.val.size(); ++i2) {
      const double d2 = o2.val[i2];
      const double d12 = d1sq + d2 * d2;
      const bool direct12 = o1.direct[i1] && o2.direct[i2];
      if (d12 > rcut2 && !direct12) continue;
      for (std::size_t i3 = 0; i3 < o3.val.size(); ++i3) {
        const double d3 = o3.val[i3];
        const double r2 = d12 + d3 * d3;
        const bool direct = direct12 && o3.direct[i3];
        if (direct) {
          const double r = std::sqrt(r2);
          if (subtract_self_free)
            s += (r < coincident_tol) ? -P / (4.0 * pi) : std::expm1(-P * r) / (4.0 * pi * r);
          else {
            if (r < coincident_tol)
              throw std::invalid_argument("kernel evaluation at coincident points");
            s += std::exp(-P * r) / (4.0 * pi * r);
          }
        } else {
          if (r2 > rcut2) continue;
          const double r = std::sqrt(r2);
          if (r < coincident_tol)
            throw std::invalid_argument("kernel evaluation: point pair touches an image");
          s += std::exp(-P * r) / (4.0 * pi * r);
        }
      }
    }
  }
  return s;
}

}  // namespace

Kernel Kernel::make_phi(ModeGrid g) {
  Kernel k;
  k.kind_ = KernelKind::phi;
  k.grid_ = g;
  k.kappa_split_ = 0.0;
  k.setup_split();
  return k;
}

Kernel Kernel::make_gp(ModeGrid g, double P) {
  if (!(P > 0.0)) throw invalid_config("Kernel::make_gp: P must be positive");
  Kernel k;
  k.kind_ = KernelKind::gp;
  k.grid_ = g;
  k.P_ = P;
  return k;
}

Kernel Kernel::make_helmholtz(ModeGrid g, double omega, const MediumSpec& medium) {
  Eigen::MatrixXd A = -omega * omega * medium.n2_matrix(g);
  for (std::size_t t = 0; t < g.size(); ++t) A(t, t) += g.ksq(t);
  return make_helmholtz_precomputed(g, omega, medium, std::move(A));
}

Kernel Kernel::make_helmholtz_precomputed(ModeGrid g, double omega, const MediumSpec& medium,
                                          Eigen::MatrixXd Ain) {
  Kernel k;
  k.kind_ = KernelKind::helmholtz;
  k.grid_ = g;
  k.omega_ = omega;
  k.medium_ = medium;

  const std::size_t sz = g.size();
  if (static_cast<std::size_t>(Ain.rows()) != sz || static_cast<std::size_t>(Ain.cols()) != sz)
    throw std::invalid_argument("make_helmholtz_precomputed: matrix size mismatch");
  auto A = std::make_shared<Eigen::MatrixXd>(std::move(Ain));
  k.A_ = A;
  k.lu_ = std::make_shared<Eigen::PartialPivLU<Eigen::MatrixXd>>(*A);

  const auto& U = k.lu_->matrixLU();
  double umax = 0.0, umin = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < sz; ++t) {
    const double u = std::abs(U(t, t));
    umax = std::max(umax, u);
    umin = std::min(umin, u);
  }
  k.cond_est_ = (umin > 0.0) ? umax / umin : std::numeric_limits<double>::infinity();
  if (!(k.cond_est_ < 1e12))
    throw solver_failure(
        "helmholtz kernel assembly: omega^2 is numerically a Neumann eigenvalue of "
        "-n^-2 Delta (condition estimate " +
        format_double(k.cond_est_) + ")");

  k.kappa_split_ = omega * omega * medium.offset;
  k.setup_split();
  return k;
}

void Kernel::setup_split() {
  // Nudge the split constant off attainable |k|^2 values so the reference
  // diagonal never degenerates; the difference goes into the band correction.
  if (kind_ == KernelKind::helmholtz && near_lattice_value(kappa_split_, 0.12))
    kappa_split_ += 0.17;

  // Farthest neglected image sits at distance >= 2 pi M; keep
  // e^{-2 pi M P} ~ 1e-12.
  for (int j = 0; j < 3; ++j)
    mimg_[j] = std::max(1, static_cast<int>(std::ceil(27.6 / (2.0 * pi * pref_[j]))));

  // Partial fractions: 1/(t - ks) = sum_j c_j/(t + P_j^2) + O(t^-4).
  Eigen::Matrix3d V;
  Eigen::Vector3d rhs;
  for (int j = 0; j < 3; ++j) {
    const double p2 = pref_[j] * pref_[j];
    V(0, j) = 1.0;
    V(1, j) = p2;
    V(2, j) = p2 * p2;
  }
  rhs << 1.0, -kappa_split_, kappa_split_ * kappa_split_;
  const Eigen::Vector3d c = V.fullPivLu().solve(rhs);
  for (int j = 0; j < 3; ++j) cref_[j] = c[j];

  mode_w_ = Eigen::VectorXd(grid_.size());
  for (std::size_t t = 0; t < grid_.size(); ++t) {
    const double k2 = grid_.ksq(t);
    double target;
    if (kind_ == KernelKind::phi)
      target = (k2 == 0.0) ? 0.0 : 1.0 / k2;  // mean-corrected Laplace
    else
      target = 1.0 / (k2 - kappa_split_);
    double ref = 0.0;
    for (int j = 0; j < 3; ++j) ref += cref_[j] / (k2 + pref_[j] * pref_[j]);
    mode_w_[t] = target - ref;
  }

  has_band_ = (kind_ == KernelKind::helmholtz) &&
              (!medium_.terms.empty() ||
               kappa_split_ != omega_ * omega_ * medium_.offset);
}

SpectralField Kernel::apply_newtonian(const SpectralField& f) const {
  if (!(f.grid == grid_)) throw std::invalid_argument("apply_newtonian: grid mismatch");
  return SpectralField(grid_, apply_newtonian(f.c));
}

Eigen::VectorXcd Kernel::apply_newtonian(const Eigen::VectorXcd& f) const {
  if (static_cast<std::size_t>(f.size()) != grid_.size())
    throw std::invalid_argument("apply_newtonian: size mismatch");
  if (kind_ == KernelKind::helmholtz) return solve_shifted(f, 0.0);
  Eigen::VectorXcd out(f.size());
  for (std::size_t t = 0; t < grid_.size(); ++t) out[t] = diag_weight(t) * f[t];
  return out;
}

Eigen::VectorXcd Kernel::solve_shifted(const Eigen::VectorXcd& rhs, double shift) const {
  if (kind_ != KernelKind::helmholtz)
    throw std::logic_error("solve_shifted: only the helmholtz kernel carries a dense matrix");
  if (shift == 0.0) {
    const Eigen::VectorXd re = lu_->solve(Eigen::VectorXd(rhs.real()));
    const Eigen::VectorXd im = lu_->solve(Eigen::VectorXd(rhs.imag()));
    return re.cast<cplx>() + cplx(0.0, 1.0) * im.cast<cplx>();
  }
  Eigen::MatrixXd As = *A_;
  As.diagonal().array() -= shift;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(As);
  const Eigen::VectorXd re = lu.solve(Eigen::VectorXd(rhs.real()));
  const Eigen::VectorXd im = lu.solve(Eigen::VectorXd(rhs.imag()));
  return re.cast<cplx>() + cplx(0.0, 1.0) * im.cast<cplx>();
}

double Kernel::diag_weight(std::size_t t) const {
  const double k2 = grid_.ksq(t);
  switch (kind_) {
    case KernelKind::phi:
      return (k2 == 0.0) ? 0.0 : 1.0 / k2;
    case KernelKind::gp:
      return 1.0 / (k2 + P_ * P_);
    default:
      throw std::logic_error("diag_weight: helmholtz kernel is not diagonal");
  }
}

double Kernel::point_eval(const Vector3d& x, const Vector3d& y) const {
  if ((x - y).norm() < coincident_tol)
    throw std::invalid_argument("point_eval: coincident points");
  const Eigen::VectorXd px = psi_vector(grid_, x);
  const Eigen::VectorXd py = psi_vector(grid_, y);
  if (kind_ == KernelKind::helmholtz) {
    const Eigen::VectorXd col = lu_->solve(py);
    return px.dot(col);
  }
  double s = 0.0;
  for (std::size_t t = 0; t < grid_.size(); ++t) s += px[t] * py[t] * diag_weight(t);
  return s;
}

double Kernel::image_sum(const Vector3d& x, const Vector3d& y, bool subtract_free) const {
  if (kind_ == KernelKind::gp) {
    const int M = std::max(1, static_cast<int>(std::ceil(27.6 / (2.0 * pi * P_))));
    return image_kernel(x, y, P_, M, subtract_free);
  }
  double total = 0.0;
  for (int j = 0; j < 3; ++j)
    total += cref_[j] * image_kernel(x, y, pref_[j], mimg_[j], subtract_free);
  return total;
}

std::pair<double, double> Kernel::singular_split(const Vector3d& x, const Vector3d& y) const {
  const double r = (x - y).norm();
  const double free_part =
      (r < coincident_tol) ? std::numeric_limits<double>::infinity() : 1.0 / (4.0 * pi * r);

  double rem = image_sum(x, y, /*subtract_free=*/true);
  if (kind_ != KernelKind::gp) {
    const Eigen::VectorXd px = psi_vector(grid_, x);
    const Eigen::VectorXd py = psi_vector(grid_, y);
    rem += px.dot((mode_w_.array() * py.array()).matrix());
    if (has_band_) {
      Eigen::VectorXd u = py;
      for (std::size_t t = 0; t < grid_.size(); ++t) u[t] /= (grid_.ksq(t) - kappa_split_);
      Eigen::VectorXcd bu = omega_ * omega_ * medium_.apply_n2(grid_, u.cast<cplx>()) -
                            kappa_split_ * u.cast<cplx>();
      const Eigen::VectorXd col = lu_->solve(Eigen::VectorXd(bu.real()));
      rem += px.dot(col);
    }
  }
  return {free_part, rem};
}

double Kernel::stable_eval(const Vector3d& x, const Vector3d& y) const {
  const auto [free_part, rem] = singular_split(x, y);
  if (std::isinf(free_part)) throw std::invalid_argument("stable_eval: coincident points");
  return free_part + rem;
}

double Kernel::condition_estimate() const { return cond_est_; }

const Eigen::MatrixXd& Kernel::galerkin_matrix() const {
  if (!A_) throw std::logic_error("galerkin_matrix: diagonal kernel");
  return *A_;
}

Kernel::PointBatch Kernel::prepare_points(const std::vector<Vector3d>& pts, int threads) const {
  PointBatch b;
  b.pts = pts;
  const std::size_t sz = grid_.size();
  const std::size_t M = pts.size();
  b.psi.resize(sz, M);
  for (std::size_t j = 0; j < M; ++j) b.psi.col(j) = psi_vector(grid_, pts[j]);

  if (kind_ == KernelKind::gp) return b;  // images alone are exact

  b.wcol.resize(sz, M);
  if (has_band_) {
    parallel_for(M, threads, [&](std::size_t j) {
      Eigen::VectorXd u = b.psi.col(j);
      for (std::size_t t = 0; t < sz; ++t) u[t] /= (grid_.ksq(t) - kappa_split_);
      Eigen::VectorXcd bu = omega_ * omega_ * medium_.apply_n2(grid_, u.cast<cplx>()) -
                            kappa_split_ * u.cast<cplx>();
      const Eigen::VectorXd col = lu_->solve(Eigen::VectorXd(bu.real()));
      b.wcol.col(j) = col + (mode_w_.array() * b.psi.col(j).array()).matrix();
    });
  } else {
    for (std::size_t j = 0; j < M; ++j)
      b.wcol.col(j) = (mode_w_.array() * b.psi.col(j).array()).matrix();
  }
  return b;
}

double Kernel::pair_eval(const PointBatch& b, int m, int j) const {
  if (m == j) throw std::invalid_argument("pair_eval: coincident droplet indices");
  double v = image_sum(b.pts[m], b.pts[j], /*subtract_free=*/false);
  if (b.wcol.size() > 0) v += b.psi.col(m).dot(b.wcol.col(j));
  return v;
}

double Kernel::pair_remainder(const PointBatch& b, int m, int j) const {
  double v = image_sum(b.pts[m], b.pts[j], /*subtract_free=*/true);
  if (b.wcol.size() > 0) v += b.psi.col(m).dot(b.wcol.col(j));
  return v;
}

}  // namespace dlab
