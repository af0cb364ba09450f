#include "ppfe/analysis.hpp"

#include "ppfe/format.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ppfe {

namespace {

std::vector<Eigen::Index> output_dims(const std::vector<SensorModel>& sensors) {
  std::vector<Eigen::Index> dims;
  for (const auto& s : sensors) dims.push_back(s.output_dim());
  return dims;
}

Mat block_mask(const std::vector<Eigen::Index>& dims, const std::vector<double>& scale) {
  Eigen::Index n = 0;
  for (auto d : dims) n += d;
  Mat m = Mat::Zero(n, n);
  Eigen::Index r = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    m.block(r, r, dims[i], dims[i]).setConstant(scale[i]);
    r += dims[i];
  }
  return m;
}

Vec block_diagonal(const std::vector<Eigen::Index>& dims, const std::vector<double>& scale) {
  Eigen::Index n = 0;
  for (auto d : dims) n += d;
  Vec v(n);
  Eigen::Index r = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    v.segment(r, dims[i]).setConstant(scale[i]);
    r += dims[i];
  }
  return v;
}

void refresh_distortion(BoundParams& params, const Mat& sigma) {
  for (std::size_t i = 0; i < params.channels(); ++i) {
    params.distortion[i] =
        default_distortion_rate(params.sensors[i], sigma, params.step[i], params.scale);
  }
}

}  // namespace

void BoundParams::validate() const {
  linalg::require_square(A, "A");
  linalg::require_square(Qeff, "Qeff");
  linalg::require_rows(Qeff, A.rows(), "Qeff");
  const std::size_t m = sensors.size();
  if (m == 0) throw std::invalid_argument("bound parameters need at least one sensor");
  if (gamma.size() != m || distortion.size() != m) {
    throw DimensionError("gamma and distortion rates need one entry per sensor");
  }
  if (!eta.empty() && eta.size() != m) throw DimensionError("eta needs one entry per sensor");
  if (!step.empty() && step.size() != m) throw DimensionError("step needs one entry per sensor");
  for (std::size_t i = 0; i < m; ++i) {
    if (!(gamma[i] > 0.0 && gamma[i] <= kGammaCap)) {
      throw std::invalid_argument("gamma must lie in (0, 1 - 1e-9]");
    }
    if (!(distortion[i] >= 0.0 && distortion[i] < 1.0)) {
      throw std::invalid_argument("distortion rate must lie in [0, 1)");
    }
    if (!eta.empty() && !(eta[i] > 0.0)) throw std::invalid_argument("eta must be > 0");
    sensors[i].validate(A.rows());
  }
  if (scale == 0.0) throw std::invalid_argument("s must be nonzero");
}

BoundParams make_bound_params(const SystemModel& model, const std::vector<SensorModel>& sensors,
                              const std::vector<double>& gamma, const CodecConfig& codec) {
  BoundParams p;
  p.A = model.A;
  p.Qeff = model.effective_process_cov();
  p.sensors = sensors;
  p.scale = codec.scale;
  p.step = codec.step;
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    double g = gamma[i];
    if (g > kGammaCap) {
      p.warnings.push_back("channel " + std::to_string(i + 1) +
                           ": reception probability capped at 1 - 1e-9");
      g = kGammaCap;
    }
    p.gamma.push_back(g);
  }
  p.distortion.assign(sensors.size(), 0.0);
  if (codec.transparent) {
    p.step.assign(sensors.size(), 0.0);
  } else {
    if (codec.step.size() != sensors.size()) {
      throw DimensionError("codec parameters need one entry per sensor");
    }
    refresh_distortion(p, model.P0);
  }
  p.validate();
  return p;
}

Mat stacked_C(const std::vector<SensorModel>& sensors) {
  Eigen::Index rows = 0;
  for (const auto& s : sensors) rows += s.output_dim();
  Mat C(rows, sensors.empty() ? 0 : sensors.front().C.cols());
  Eigen::Index r = 0;
  for (const auto& s : sensors) {
    C.middleRows(r, s.output_dim()) = s.C;
    r += s.output_dim();
  }
  return C;
}

Mat stacked_R(const std::vector<SensorModel>& sensors) {
  std::vector<Mat> blocks;
  for (const auto& s : sensors) blocks.push_back(s.noise_cov());
  return linalg::block_diag(blocks);
}

double default_distortion_rate(const SensorModel& sensor, const Mat& sigma, double step,
                               double scale) {
  const Mat S = sensor.C * sigma * sensor.C.transpose() + sensor.noise_cov();
  const double lo = linalg::min_eigenvalue(S);
  if (!(lo > 0.0)) throw NumericError("C Σ Cᵀ + R is not positive definite");
  return std::min(1.0 - 1e-6, scale * scale * (step * step / 4.0) / lo);
}

double default_eta(double distortion, double scale) {
  return std::sqrt(distortion) / std::abs(scale);
}

Mat v_matrix(const BoundParams& params) {
  const double s = std::abs(params.scale);
  std::vector<double> v;
  for (std::size_t i = 0; i < params.channels(); ++i) {
    const double dn = params.distortion[i];
    const double eta = params.eta.empty() ? default_eta(dn, params.scale) : params.eta[i];
    double sq = s * s * dn;
    if (eta > 0.0) sq += s * eta + dn / (s * eta);
    v.push_back(std::sqrt(sq));
  }
  return block_diagonal(output_dims(params.sensors), v).asDiagonal();
}

WScalar w_scalar(const Mat& sigma, const Mat& C, const Mat& R, const Mat& V) {
  const Mat S = linalg::symmetrize(C * sigma * C.transpose() + R);
  const double lo = linalg::min_eigenvalue(S);
  if (!(lo > 0.0)) throw NumericError("C Σ Cᵀ + R is singular");
  const double num = linalg::min_eigenvalue(linalg::symmetrize(S - V * S * V));
  if (num < 0.0) return {0.0, true};
  return {std::sqrt(num / linalg::max_eigenvalue(S)), false};
}

Mat weight_matrix(const std::vector<double>& gamma, const std::vector<Eigen::Index>& dims) {
  if (gamma.size() != dims.size()) throw DimensionError("gamma needs one entry per sensor");
  std::vector<double> extra;
  for (double g : gamma) extra.push_back((1.0 - g) / g);
  const Mat mask = block_mask(dims, extra);
  return Mat::Ones(mask.rows(), mask.cols()) + mask;
}

Mat mare_g(const Mat& X, const BoundParams& params, double w) {
  const auto dims = output_dims(params.sensors);
  std::vector<Mat> h;
  for (const auto& s : params.sensors) {
    h.push_back(linalg::spd_inverse_sqrt(s.noise_cov()) * s.C * w);
  }
  Mat H(stacked_C(params.sensors).rows(), X.cols());
  Eigen::Index r = 0;
  for (const auto& b : h) {
    H.middleRows(r, b.rows()) = b;
    r += b.rows();
  }
  const Mat& A = params.A;
  const Mat inner = weight_matrix(params.gamma, dims).cwiseProduct(
      H * X * H.transpose() + Mat::Identity(H.rows(), H.rows()));
  Eigen::FullPivLU<Mat> lu(inner);
  if (!lu.isInvertible()) throw NumericError("MARE inner matrix is singular");
  const Mat AXHt = A * X * H.transpose();
  return linalg::symmetrize(A * X * A.transpose() + params.Qeff -
                            AXHt * lu.solve(AXHt.transpose()));
}

std::vector<double> BoundSequence::traces() const {
  std::vector<double> t;
  t.reserve(iterates.size());
  for (const auto& m : iterates) t.push_back(m.trace());
  return t;
}

BoundSequence iterate_bound(const Mat& initial, BoundParams params, const IterateOptions& opts) {
  params.validate();
  if (opts.recompute_w && params.step.size() != params.channels()) {
    throw std::invalid_argument("refreshing the distortion rate needs quantization steps");
  }
  BoundSequence seq;
  seq.warnings = params.warnings;
  seq.iterates.push_back(linalg::symmetrize(initial));
  const Mat C = stacked_C(params.sensors);
  const Mat R = stacked_R(params.sensors);
  bool warned_clamp = false;

  for (std::size_t step = 0; step < opts.steps; ++step) {
    const Mat& current = seq.iterates.back();
    double w = opts.fixed_w;
    if (opts.recompute_w) {
      refresh_distortion(params, current);
      const WScalar ws = w_scalar(current, C, R, v_matrix(params));
      w = ws.w;
      if (ws.clamped && !warned_clamp) {
        seq.warnings.push_back("S - VSV indefinite at iterate " + std::to_string(step) +
                               "; w clamped to 0");
        warned_clamp = true;
      }
    }
    seq.w.push_back(w);
    Mat next = mare_g(current, params, w);
    const double tr = next.trace();
    const bool converged_now = linalg::relative_change(next, current) < opts.tol;
    seq.iterates.push_back(std::move(next));
    if (!std::isfinite(tr) || tr > opts.divergence_trace) {
      seq.diverged = true;
      seq.converged = false;
      seq.fixed_point.reset();
      break;
    }
    if (converged_now && !seq.converged) {
      seq.converged = true;
      seq.converged_at = step + 1;
      seq.fixed_point = seq.iterates.back();
      if (opts.stop_on_convergence) break;
    }
  }
  return seq;
}

MahlerReport mahler_entropy(const Mat& A) {
  linalg::require_square(A, "A");
  Eigen::EigenSolver<Mat> es(A, false);
  MahlerReport r;
  for (const auto& l : es.eigenvalues()) r.measure *= std::max(std::abs(l), 1.0);
  r.entropy = std::log(r.measure);
  return r;
}

CapacityReport capacity_condition(const Mat& A, const std::vector<double>& gamma) {
  CapacityReport r;
  const MahlerReport m = mahler_entropy(A);
  r.measure = m.measure;
  r.entropy = m.entropy;
  r.capacity = total_capacity(gamma);
  r.holds = r.capacity > r.entropy;
  return r;
}

PbhReport pbh_unit_circle(const Mat& A, const Mat& Qeff) {
  linalg::require_square(A, "A");
  linalg::require_rows(Qeff, A.rows(), "Qeff");
  using CMat = Eigen::MatrixXcd;
  const Eigen::Index n = A.rows();
  const Mat Bf = linalg::psd_factor(Qeff);
  Eigen::EigenSolver<Mat> es(A, false);
  PbhReport r;
  for (const auto& l : es.eigenvalues()) {
    if (std::abs(std::abs(l) - 1.0) >= 1e-8) continue;
    CMat M(n, n + Bf.cols());
    M.leftCols(n) = A.cast<std::complex<double>>() - l * CMat::Identity(n, n);
    M.rightCols(Bf.cols()) = Bf.cast<std::complex<double>>();
    Eigen::JacobiSVD<CMat> svd(M);
    const auto& sv = svd.singularValues();
    const double thresh = 1e-10 * (sv.size() ? sv.maxCoeff() : 0.0);
    Eigen::Index rank = 0;
    for (Eigen::Index j = 0; j < sv.size(); ++j) rank += sv(j) > thresh ? 1 : 0;
    const bool full = rank == n;
    r.unit_circle_eigenvalues.push_back(l);
    r.full_rank.push_back(full);
    r.holds = r.holds && full;
  }
  return r;
}

StabilityCheck check_stability_inequality(const Mat& A, const Mat& sigma, const Mat& K,
                                          const std::vector<double>& gamma, const Mat& H,
                                          const std::vector<Eigen::Index>& dims) {
  std::vector<double> var;
  for (double g : gamma) var.push_back(g * (1.0 - g));
  const Mat G = block_diagonal(dims, gamma).asDiagonal();
  const Mat F = A - K * G * H;
  const Mat hadamard = block_mask(dims, var).cwiseProduct(H * sigma * H.transpose());
  const Mat lhs = sigma - F * sigma * F.transpose() - K * hadamard * K.transpose();
  StabilityCheck c;
  c.margin = linalg::min_eigenvalue(linalg::symmetrize(lhs));
  c.holds = c.margin > 0.0;
  return c;
}

KappaReport kappa_bound(const Mat& Qeff, const Mat& C, const Mat& Pe, const Mat& R) {
  KappaReport r;
  const Mat S = linalg::symmetrize(C * Pe * C.transpose() + R);
  if (!(linalg::min_eigenvalue(S) > 0.0)) throw NumericError("innovation covariance singular");
  const double qmin = linalg::min_eigenvalue(Qeff);
  if (qmin <= 0.0) {
    r.warnings.push_back("effective process covariance is singular; kappa bound is vacuous");
    r.kappa = 0.0;
  } else {
    const double smax = linalg::max_eigenvalue(S);
    r.kappa = qmin * qmin * linalg::min_eigenvalue(C * C.transpose()) / (smax * smax);
  }
  const Mat K = Eigen::LLT<Mat>(S).solve(C * Pe).transpose();
  const Mat KtK = K.transpose() * K;
  r.margin = linalg::min_eigenvalue(
      linalg::symmetrize(KtK - r.kappa * Mat::Identity(KtK.rows(), KtK.cols())));
  r.holds = r.margin >= -1e-12 * std::max(1.0, KtK.norm());
  return r;
}

DominationReport noise_domination_check(const Mat& sigma, const std::vector<SensorModel>& sensors,
                          const CodecConfig& codec, const std::vector<bool>& received,
                          std::size_t samples, RandomStream& rng) {
  const std::size_t m = sensors.size();
  if (received.size() != m) throw DimensionError("outcomes need one entry per sensor");
  codec.validate(m);
  if (samples < 2) throw std::invalid_argument("noise_domination_check needs at least two samples");
  const auto dims = output_dims(sensors);
  const Mat C = stacked_C(sensors);
  const Mat R = stacked_R(sensors);
  const Eigen::Index n = C.rows();
  const double s = codec.scale;

  std::vector<double> g(m);
  for (std::size_t i = 0; i < m; ++i) g[i] = received[i] ? 1.0 : 0.0;
  const Vec gdiag = block_diagonal(dims, g);

  const GaussianSampler prediction_error(sigma);
  std::vector<GaussianSampler> noise;
  for (const auto& sn : sensors) noise.emplace_back(sn.R);

  Mat sum = Mat::Zero(n, n);
  Mat sumsq = Mat::Zero(n, n);
  Vec e(n), v(n);
  for (std::size_t j = 0; j < samples; ++j) {
    const Vec xt = prediction_error.sample(rng);
    e.setZero();
    v.setZero();
    Eigen::Index r = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const Eigen::Index d = dims[i];
      if (received[i]) {
        const Vec vi = sensors[i].E * noise[i].sample(rng);
        const Vec input = (sensors[i].C * xt + vi) / s;
        const QuantizedVector qv = quantize(input, codec.step[i], rng);
        e.segment(r, d) = qv.value - input;
        v.segment(r, d) = vi;
      }
      r += d;
    }
    const Mat sample = s * s * e * e.transpose() + s * (v * e.transpose() + e * v.transpose());
    sum += sample;
    sumsq += sample.cwiseProduct(sample);
  }
  const double N = static_cast<double>(samples);
  DominationReport rep;
  rep.lhs = sum / N;
  const Mat var = ((sumsq / N - rep.lhs.cwiseProduct(rep.lhs)) * (N / (N - 1.0))).cwiseMax(0.0);
  rep.slack = 3.0 * (var / N).cwiseSqrt().norm();

  BoundParams p;
  p.sensors = sensors;
  p.scale = s;
  p.distortion.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    p.distortion[i] = default_distortion_rate(sensors[i], sigma, codec.step[i], s);
  }
  const Mat V = v_matrix(p);
  const Mat G = gdiag.asDiagonal();
  rep.rhs_channel = Mat::Zero(n, n);
  Eigen::Index r = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const Eigen::Index d = dims[i];
    const double vi = V(r, r);
    rep.rhs_channel.block(r, r, d, d) =
        g[i] * vi * vi * (sensors[i].C * sigma * sensors[i].C.transpose() + sensors[i].noise_cov());
    r += d;
  }
  const Mat Cg = G * C;
  rep.rhs_stacked = V * (Cg * sigma * Cg.transpose() + G * R * G) * V;
  rep.margin_first = linalg::min_eigenvalue(linalg::symmetrize(rep.rhs_channel - rep.lhs));
  rep.margin_second =
      linalg::min_eigenvalue(linalg::symmetrize(rep.rhs_stacked - rep.rhs_channel));
  rep.holds = rep.margin_first > -rep.slack && rep.margin_second > -rep.slack;
  return rep;
}

void write_bound_csv(std::ostream& os, const BoundSequence& seq) {
  os << "k,trace\n";
  for (std::size_t k = 0; k < seq.iterates.size(); ++k) {
    os << k << ',' << format_double(seq.iterates[k].trace()) << '\n';
  }
}

}  // namespace ppfe
