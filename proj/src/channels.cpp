#include "chanest/channels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

#include "chanest/errors.hpp"

namespace chanest {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool outside(double value, double lo, double hi, double tol) {
  return !std::isfinite(value) || value < lo - tol || value > hi + tol;
}

std::string describe(std::string_view what, double value, double lo, double hi) {
  std::ostringstream os;
  os << what << " = " << value << " outside [" << lo << ", " << hi << "]";
  return os.str();
}

void check_interval(std::string_view what, double value, double lo, double hi, double tol) {
  if (outside(value, lo, hi, tol)) throw ConfigError(describe(what, value, lo, hi));
}

AffineMap affine_from_params(const Vector12d& l) {
  // Row k reads lambda_{k}, lambda_{k+3}, lambda_{k+6}, lambda_{k+9}
  // (1-based), i.e. indices k, k+3, k+6, k+9 here.
  AffineMap a;
  for (int k = 0; k < 3; ++k) {
    const double down = l(k);
    const double up = l(k + 3);
    const double px = l(k + 6);
    const double py = l(k + 9);
    a.M(k, 0) = 2.0 * px - down - up;
    a.M(k, 1) = 2.0 * py - down - up;
    a.M(k, 2) = up - down;
    a.v(k) = down + up - 1.0;
  }
  return a;
}

Eigen::Matrix2cd sandwich(const Eigen::Matrix2cd& k, const Eigen::Matrix2cd& x) { return k * x * k.adjoint(); }

}  // namespace

std::string_view to_string(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::Depolarizing: return "depolarizing";
    case ChannelKind::PhaseDamping: return "phase-damping";
    case ChannelKind::AmplitudeDamping: return "amplitude-damping";
    case ChannelKind::PauliQubit: return "pauli";
    case ChannelKind::GeneralAffine: return "general";
    case ChannelKind::GeneralizedPauli: return "generalized-pauli";
  }
  return "unknown";
}

ChannelKind channel_kind_from_string(std::string_view name) {
  for (ChannelKind k : {ChannelKind::Depolarizing, ChannelKind::PhaseDamping, ChannelKind::AmplitudeDamping,
                        ChannelKind::PauliQubit, ChannelKind::GeneralAffine, ChannelKind::GeneralizedPauli}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown channel kind '" + std::string(name) + "'");
}

ChannelKind kind_of(const ChannelModel& c) { return static_cast<ChannelKind>(c.index()); }

bool is_qubit_channel(const ChannelModel& c) { return kind_of(c) != ChannelKind::GeneralizedPauli; }

std::optional<std::string> range_violation(const ChannelModel& c, double tol) {
  using Result = std::optional<std::string>;
  auto interval = [&](std::string_view what, double v, double lo, double hi) -> Result {
    if (outside(v, lo, hi, tol)) return describe(what, v, lo, hi);
    return std::nullopt;
  };
  return std::visit(
      Overloaded{
          [&](const Depolarizing& d) { return interval("depolarizing lambda", d.lambda, 0.0, 0.5); },
          [&](const PhaseDamping& d) { return interval("phase-damping lambda", d.lambda, 0.0, 0.5); },
          [&](const AmplitudeDamping& d) { return interval("amplitude-damping lambda", d.lambda, 0.0, 1.0); },
          [&](const PauliQubit& p) -> Result {
            for (int k = 0; k < 3; ++k) {
              if (auto r = interval("pauli lambda", p.lambda(k), 0.0, 1.0)) return r;
            }
            return interval("pauli lambda sum", p.lambda.sum(), 0.0, 1.0);
          },
          [&](const GeneralAffine& g) -> Result {
            for (int k = 0; k < 12; ++k) {
              if (auto r = interval("general lambda", g.lambda(k), 0.0, 1.0)) return r;
            }
            return std::nullopt;
          },
          [&](const GeneralizedPauli& g) -> Result {
            if (g.lambda.rows() < 2 || g.lambda.rows() != g.lambda.cols()) {
              return "generalized pauli: lambda must be a DxD array with D >= 2";
            }
            for (Eigen::Index i = 0; i < g.lambda.size(); ++i) {
              if (auto r = interval("generalized pauli lambda", g.lambda.data()[i], 0.0, 1.0)) return r;
            }
            if (std::abs(g.lambda.sum() - 1.0) > std::max(tol, 1e-12)) {
              return "generalized pauli: probabilities must sum to 1";
            }
            return std::nullopt;
          },
      },
      c);
}

void validate_range(const ChannelModel& c, double tol) {
  if (auto r = range_violation(c, tol)) throw ConfigError(*r);
}

bool in_range(const ChannelModel& c, double tol) {
  // Same rules as range_violation, without building messages; this runs on
  // every enumerated estimate.
  auto box = [tol](const auto& v, double hi) { return (v.array() >= -tol).all() && (v.array() <= hi + tol).all(); };
  switch (kind_of(c)) {
    case ChannelKind::Depolarizing:
    case ChannelKind::PhaseDamping:
    case ChannelKind::AmplitudeDamping: {
      const double l = parameters(c)(0);
      const double hi = kind_of(c) == ChannelKind::AmplitudeDamping ? 1.0 : 0.5;
      return l >= -tol && l <= hi + tol;
    }
    case ChannelKind::PauliQubit: {
      const auto& l = std::get<PauliQubit>(c).lambda;
      return box(l, 1.0) && l.sum() >= -tol && l.sum() <= 1.0 + tol;
    }
    case ChannelKind::GeneralAffine: return box(std::get<GeneralAffine>(c).lambda, 1.0);
    case ChannelKind::GeneralizedPauli: return !range_violation(c, tol).has_value();
  }
  return false;
}

ChannelModel make_depolarizing(double lambda) {
  ChannelModel c = Depolarizing{lambda};
  validate_range(c);
  return c;
}

ChannelModel make_phase_damping(double lambda) {
  ChannelModel c = PhaseDamping{lambda};
  validate_range(c);
  return c;
}

ChannelModel make_amplitude_damping(double lambda) {
  ChannelModel c = AmplitudeDamping{lambda};
  validate_range(c);
  return c;
}

ChannelModel make_pauli(const Eigen::Vector3d& lambda) {
  ChannelModel c = PauliQubit{lambda};
  validate_range(c);
  return c;
}

ChannelModel make_general_affine(const Vector12d& lambda) {
  ChannelModel c = GeneralAffine{lambda};
  validate_range(c);
  return c;
}

ChannelModel make_generalized_pauli(const Eigen::MatrixXd& lambda) {
  ChannelModel c = GeneralizedPauli{lambda};
  validate_range(c);
  return c;
}

Eigen::VectorXd parameters(const ChannelModel& c) {
  return std::visit(Overloaded{
                        [](const Depolarizing& d) { return Eigen::VectorXd::Constant(1, d.lambda).eval(); },
                        [](const PhaseDamping& d) { return Eigen::VectorXd::Constant(1, d.lambda).eval(); },
                        [](const AmplitudeDamping& d) { return Eigen::VectorXd::Constant(1, d.lambda).eval(); },
                        [](const PauliQubit& p) { return Eigen::VectorXd(p.lambda); },
                        [](const GeneralAffine& g) { return Eigen::VectorXd(g.lambda); },
                        [](const GeneralizedPauli& g) {
                          const int d = g.dim();
                          Eigen::VectorXd out(d * d - 1);
                          int k = 0;
                          for (int a = 0; a < d; ++a) {
                            for (int b = 0; b < d; ++b) {
                              if (a == 0 && b == 0) continue;
                              out(k++) = g.lambda(a, b);
                            }
                          }
                          return out;
                        },
                    },
                    c);
}

ChannelModel from_parameters(ChannelKind kind, const Eigen::VectorXd& p, int dim) {
  auto need = [&](Eigen::Index n) {
    if (p.size() != n) throw DimensionMismatch("from_parameters: wrong parameter count for " +
                                               std::string(to_string(kind)));
  };
  switch (kind) {
    case ChannelKind::Depolarizing: need(1); return Depolarizing{p(0)};
    case ChannelKind::PhaseDamping: need(1); return PhaseDamping{p(0)};
    case ChannelKind::AmplitudeDamping: need(1); return AmplitudeDamping{p(0)};
    case ChannelKind::PauliQubit: need(3); return PauliQubit{p.head<3>()};
    case ChannelKind::GeneralAffine: need(12); return GeneralAffine{p.head<12>()};
    case ChannelKind::GeneralizedPauli: {
      if (dim < 2) throw ConfigError("from_parameters: qudit dimension must be >= 2");
      need(static_cast<Eigen::Index>(dim) * dim - 1);
      GeneralizedPauli g{Eigen::MatrixXd::Zero(dim, dim)};
      int k = 0;
      for (int a = 0; a < dim; ++a) {
        for (int b = 0; b < dim; ++b) {
          if (a == 0 && b == 0) continue;
          g.lambda(a, b) = p(k++);
        }
      }
      g.lambda(0, 0) = 1.0 - p.sum();
      return g;
    }
  }
  throw ConfigError("from_parameters: unknown kind");
}

AffineMap params_to_affine(const Vector12d& lambda) {
  for (int k = 0; k < 12; ++k) check_interval("general lambda", lambda(k), 0.0, 1.0, 0.0);
  return affine_from_params(lambda);
}

Vector12d affine_to_params(const AffineMap& a) {
  Vector12d l;
  for (int k = 0; k < 3; ++k) {
    l(k) = 0.5 * (1.0 + a.v(k) - a.M(k, 2));      // probe (0,0,-1)
    l(k + 3) = 0.5 * (1.0 + a.v(k) + a.M(k, 2));  // probe (0,0,+1)
    l(k + 6) = 0.5 * (1.0 + a.v(k) + a.M(k, 0));  // probe (1,0,0)
    l(k + 9) = 0.5 * (1.0 + a.v(k) + a.M(k, 1));  // probe (0,1,0)
  }
  return l;
}

AffineMap to_affine(const ChannelModel& c) {
  return std::visit(Overloaded{
                        [](const Depolarizing& d) {
                          AffineMap a;
                          a.M = (1.0 - 2.0 * d.lambda) * Eigen::Matrix3d::Identity();
                          return a;
                        },
                        [](const PhaseDamping& d) {
                          AffineMap a;
                          a.M.diagonal() << 1.0 - 2.0 * d.lambda, 1.0 - 2.0 * d.lambda, 1.0;
                          return a;
                        },
                        [](const AmplitudeDamping& d) {
                          AffineMap a;
                          const double r = std::sqrt(std::max(0.0, 1.0 - d.lambda));
                          a.M.diagonal() << r, r, 1.0 - d.lambda;
                          a.v << 0.0, 0.0, d.lambda;
                          return a;
                        },
                        [](const PauliQubit& p) {
                          const Eigen::Vector3d& l = p.lambda;
                          AffineMap a;
                          a.M.diagonal() << 1.0 - 2.0 * (l(1) + l(2)), 1.0 - 2.0 * (l(0) + l(2)),
                              1.0 - 2.0 * (l(0) + l(1));
                          return a;
                        },
                        [](const GeneralAffine& g) { return affine_from_params(g.lambda); },
                        [](const GeneralizedPauli&) -> AffineMap {
                          throw ConfigError("generalized pauli channel has no qubit Bloch form");
                        },
                    },
                    c);
}

BlochVector apply_channel(const AffineMap& map, const BlochVector& s) { return map(s); }

BlochVector apply_channel(const ChannelModel& c, const BlochVector& s) {
  return std::visit(Overloaded{
                        [&](const Depolarizing& d) -> BlochVector { return (1.0 - 2.0 * d.lambda) * s; },
                        [&](const PhaseDamping& d) -> BlochVector {
                          const double f = 1.0 - 2.0 * d.lambda;
                          return {f * s(0), f * s(1), s(2)};
                        },
                        [&](const AmplitudeDamping& d) -> BlochVector {
                          const double r = std::sqrt(std::max(0.0, 1.0 - d.lambda));
                          return {r * s(0), r * s(1), (1.0 - d.lambda) * s(2) + d.lambda};
                        },
                        [&](const auto&) -> BlochVector { return to_affine(c)(s); },
                    },
                    c);
}

std::vector<std::pair<double, Eigen::Matrix2cd>> weighted_kraus(const ChannelModel& c) {
  using Kraus = std::vector<std::pair<double, Eigen::Matrix2cd>>;
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  auto pauli_sum = [&](const Eigen::Vector3d& l) {
    return Kraus{{1.0 - l.sum(), id}, {l(0), pauli::x()}, {l(1), pauli::y()}, {l(2), pauli::z()}};
  };
  return std::visit(Overloaded{
                        [&](const Depolarizing& d) { return pauli_sum(Eigen::Vector3d::Constant(0.5 * d.lambda)); },
                        [&](const PhaseDamping& d) { return Kraus{{1.0 - d.lambda, id}, {d.lambda, pauli::z()}}; },
                        [&](const AmplitudeDamping& d) {
                          // |up_z> (index 1) decays into |down_z> (index 0).
                          Eigen::Matrix2cd k0 = Eigen::Matrix2cd::Zero();
                          Eigen::Matrix2cd k1 = Eigen::Matrix2cd::Zero();
                          k0(0, 0) = 1.0;
                          k0(1, 1) = std::sqrt(std::max(0.0, 1.0 - d.lambda));
                          k1(0, 1) = std::sqrt(std::max(0.0, d.lambda));
                          return Kraus{{1.0, k0}, {1.0, k1}};
                        },
                        [&](const PauliQubit& p) { return pauli_sum(p.lambda); },
                        [&](const GeneralAffine&) { return Kraus{}; },
                        [&](const GeneralizedPauli&) -> Kraus {
                          throw ConfigError("weighted_kraus: qubit channels only");
                        },
                    },
                    c);
}

Eigen::Matrix2cd apply_linear(const AffineMap& map, const Eigen::Matrix2cd& x) {
  const std::complex<double> t = x.trace();
  Eigen::Vector3cd s((x * pauli::x()).trace(), (x * pauli::y()).trace(), (x * pauli::z()).trace());
  const Eigen::Vector3cd out = map.M.cast<std::complex<double>>() * s + t * map.v.cast<std::complex<double>>();
  return 0.5 * (t * Eigen::Matrix2cd::Identity() + out(0) * pauli::x() + out(1) * pauli::y() + out(2) * pauli::z());
}

Eigen::Matrix2cd apply_linear(const ChannelModel& c, const Eigen::Matrix2cd& x) {
  if (kind_of(c) == ChannelKind::GeneralAffine) return apply_linear(to_affine(c), x);
  Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
  for (const auto& [w, k] : weighted_kraus(c)) out += w * sandwich(k, x);
  return out;
}

DensityMatrix2 apply_channel_density(const ChannelModel& c, const DensityMatrix2& rho) {
  validate_density(rho);
  return apply_linear(c, rho);
}

ChoiMatrix to_choi(const AffineMap& map) {
  ChoiMatrix j = ChoiMatrix::Zero(4, 4);
  for (int r = 0; r < 2; ++r) {
    for (int s = 0; s < 2; ++s) {
      Eigen::Matrix2cd e = Eigen::Matrix2cd::Zero();
      e(r, s) = 1.0;
      j.block<2, 2>(2 * r, 2 * s) = apply_linear(map, e);
    }
  }
  return j;
}

ChoiMatrix to_choi(const ChannelModel& c) {
  if (const auto* g = std::get_if<GeneralizedPauli>(&c)) {
    const int d = g->dim();
    ChoiMatrix j = ChoiMatrix::Zero(d * d, d * d);
    for (int r = 0; r < d; ++r) {
      for (int s = 0; s < d; ++s) {
        Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(d, d);
        e(r, s) = 1.0;
        j.block(d * r, d * s, d, d) = apply_generalized_pauli(*g, e);
      }
    }
    return j;
  }
  ChoiMatrix j = ChoiMatrix::Zero(4, 4);
  for (int r = 0; r < 2; ++r) {
    for (int s = 0; s < 2; ++s) {
      Eigen::Matrix2cd e = Eigen::Matrix2cd::Zero();
      e(r, s) = 1.0;
      j.block<2, 2>(2 * r, 2 * s) = apply_linear(c, e);
    }
  }
  return j;
}

double min_choi_eigenvalue(const ChoiMatrix& choi) {
  const ChoiMatrix h = (choi + choi.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<ChoiMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

bool is_completely_positive(const ChannelModel& c, double tol) { return min_choi_eigenvalue(to_choi(c)) >= -tol; }

bool is_completely_positive(const AffineMap& map, double tol) { return min_choi_eigenvalue(to_choi(map)) >= -tol; }

QuditOps qudit_ops(int dim) {
  if (dim < 2) throw ConfigError("qudit dimension must be >= 2");
  QuditOps ops;
  ops.dim = dim;
  ops.shift = Eigen::MatrixXcd::Zero(dim, dim);
  ops.clock = Eigen::MatrixXcd::Zero(dim, dim);
  for (int j = 0; j < dim; ++j) {
    ops.shift((j - 1 + dim) % dim, j) = 1.0;
    ops.clock(j, j) = std::polar(1.0, 2.0 * std::numbers::pi * j / dim);
  }
  std::vector<Eigen::MatrixXcd> x_pow(dim), z_pow(dim);
  x_pow[0] = z_pow[0] = Eigen::MatrixXcd::Identity(dim, dim);
  for (int k = 1; k < dim; ++k) {
    x_pow[k] = ops.shift * x_pow[k - 1];
    z_pow[k] = ops.clock * z_pow[k - 1];
  }
  ops.weyl.reserve(static_cast<std::size_t>(dim) * dim);
  for (int alpha = 0; alpha < dim; ++alpha) {
    for (int beta = 0; beta < dim; ++beta) ops.weyl.push_back(x_pow[beta] * z_pow[alpha]);
  }
  return ops;
}

Eigen::MatrixXcd apply_generalized_pauli(const GeneralizedPauli& c, const Eigen::MatrixXcd& rho, Subsystem where) {
  const int d = c.dim();
  if (d < 2 || c.lambda.cols() != d) throw DimensionMismatch("generalized pauli: lambda must be DxD, D >= 2");
  const Eigen::Index n = where == Subsystem::Whole ? d : static_cast<Eigen::Index>(d) * d;
  if (rho.rows() != n || rho.cols() != n) {
    throw DimensionMismatch("generalized pauli: density matrix has the wrong dimension");
  }
  const QuditOps ops = qudit_ops(d);
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(d, d);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
  for (int alpha = 0; alpha < d; ++alpha) {
    for (int beta = 0; beta < d; ++beta) {
      const double w = c.lambda(alpha, beta);
      if (w == 0.0) continue;
      if (where == Subsystem::Whole) {
        const Eigen::MatrixXcd& u = ops.u(alpha, beta);
        out += w * u * rho * u.adjoint();
      } else {
        const Eigen::MatrixXcd u = Eigen::kroneckerProduct(id, ops.u(alpha, beta));
        out += w * u * rho * u.adjoint();
      }
    }
  }
  return out;
}

}  // namespace chanest
