// Command-line front end: figure reproduction, property-suite driver, and
// thin runners over the library modules.

#include <CLI11.hpp>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "dmcalc/bayes.hpp"
#include "dmcalc/conditional.hpp"
#include "dmcalc/dynamics.hpp"
#include "dmcalc/em_invert.hpp"
#include "dmcalc/io.hpp"
#include "dmcalc/odot.hpp"
#include "dmcalc/tensor.hpp"

namespace fs = std::filesystem;
using namespace dmcalc;
using io::json;

namespace {

constexpr int kAngles = 720;

std::uint64_t substream(std::uint64_t master, const std::string& name) {
  std::uint64_t h = 1469598103934665603ull;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h ^ master;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out << body;
}

// ---------------------------------------------------------------------------
// SVG rendering: polyline curves in a fixed square viewport.

struct Curve {
  std::vector<std::pair<double, double>> pts;
  std::string color = "#000000";
  bool dashed = false;
  bool closed = true;
};

std::string render_svg(const std::vector<Curve>& curves, double extent) {
  const double size = 480.0;
  const double scale = size / (2.2 * extent);
  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" "
         "height=\"480\" viewBox=\"0 0 480 480\">\n";
  svg += "<rect width=\"480\" height=\"480\" fill=\"white\"/>\n";
  svg += "<line x1=\"0\" y1=\"240\" x2=\"480\" y2=\"240\" "
         "stroke=\"#cccccc\"/>\n";
  svg += "<line x1=\"240\" y1=\"0\" x2=\"240\" y2=\"480\" "
         "stroke=\"#cccccc\"/>\n";
  for (const Curve& c : curves) {
    svg += c.closed ? "<polygon points=\"" : "<polyline points=\"";
    for (const auto& [x, y] : c.pts) {
      svg += num(240.0 + scale * x) + "," + num(240.0 - scale * y) + " ";
    }
    svg += "\" fill=\"none\" stroke=\"" + c.color + "\"";
    if (c.dashed) svg += " stroke-dasharray=\"6 4\"";
    svg += " stroke-width=\"1.5\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

Eigen::Vector2d dir(int step) {
  const double theta = step * (2.0 * M_PI / kAngles);
  return {std::cos(theta), std::sin(theta)};
}

Curve ellipse_curve(const Eigen::Matrix2d& m, std::string color,
                    bool dashed = false) {
  Curve c;
  c.color = std::move(color);
  c.dashed = dashed;
  for (int s = 0; s <= kAngles; ++s) {
    Eigen::Vector2d p = m * dir(s);
    c.pts.emplace_back(p(0), p(1));
  }
  return c;
}

Curve lobe_curve(const std::vector<double>& values, std::string color,
                 bool dashed = false) {
  Curve c;
  c.color = std::move(color);
  c.dashed = dashed;
  for (int s = 0; s <= kAngles; ++s) {
    Eigen::Vector2d u = dir(s);
    const double v = values[static_cast<std::size_t>(s % kAngles)];
    c.pts.emplace_back(v * u(0), v * u(1));
  }
  return c;
}

Density figure_density() {
  return mixture_density(
      {0.2, 0.3, 0.5},
      {UnitVector::standard_basis(2, 0),
       UnitVector(Eigen::Vector2d(1, 1).normalized()),
       UnitVector::standard_basis(2, 1)});
}

// ---------------------------------------------------------------------------
// figure subcommand

int cmd_figure(const std::string& name, const fs::path& out,
               std::uint64_t seed, bool commuting) {
  fs::create_directories(out);
  if (name == "fig1") {
    Density d = figure_density();
    const Spectrum& s = d.mat().spectrum();
    json doc;
    doc["mixture"]["weights"] = {0.2, 0.3, 0.5};
    doc["mixture"]["directions"] = {
        {1.0, 0.0}, {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)}, {0.0, 1.0}};
    doc["matrix"] = io::density_to_json(d);
    doc["eigenvalues"] = {s.eigenvalues(0), s.eigenvalues(1)};
    doc["eigenvectors"] = {{s.eigenvectors(0, 0), s.eigenvectors(1, 0)},
                           {s.eigenvectors(0, 1), s.eigenvectors(1, 1)}};
    io::save_json(doc, (out / "fig1.json").string());

    std::string csv = "theta,x,y\n";
    Curve ell = ellipse_curve(d.mat().matrix(), "#1f6fb2");
    for (int i = 0; i < kAngles; ++i) {
      csv += num(i * (2.0 * M_PI / kAngles)) + "," + num(ell.pts[i].first) +
             "," + num(ell.pts[i].second) + "\n";
    }
    write_text(out / "fig1.csv", csv);

    std::vector<Curve> curves = {ell};
    for (int c = 0; c < 2; ++c) {
      Curve axis;
      axis.closed = false;
      axis.color = "#b23a1f";
      Eigen::Vector2d tip = s.eigenvalues(c) * s.eigenvectors.col(c);
      axis.pts = {{-tip(0), -tip(1)}, {tip(0), tip(1)}};
      curves.push_back(axis);
    }
    write_text(out / "fig1.svg", render_svg(curves, 1.0));
    return 0;
  }
  if (name == "fig2") {
    Density a = figure_density();
    std::vector<double> solid(kAngles), dashed(kAngles);
    bool contained = true;
    std::string csv = "theta,ellipse_x,ellipse_y,solid,dashed,contained\n";
    for (int s = 0; s < kAngles; ++s) {
      Eigen::Vector2d u = dir(s);
      solid[s] = u.dot(a.mat().matrix() * u);
      dashed[s] =
          odot_mat(a.mat(), UnitVector(Eigen::VectorXd(u)).dyad()).trace();
      const bool row_ok = dashed[s] <= solid[s] + 1e-10;
      contained = contained && row_ok;
      Eigen::Vector2d e = a.mat().matrix() * u;
      csv += num(s * (2.0 * M_PI / kAngles)) + "," + num(e(0)) + "," +
             num(e(1)) + "," + num(solid[s]) + "," + num(dashed[s]) + "," +
             (row_ok ? "1" : "0") + "\n";
    }
    write_text(out / "fig2.csv", csv);
    write_text(out / "fig2.svg",
               render_svg({ellipse_curve(a.mat().matrix(), "#1f6fb2"),
                           lobe_curve(solid, "#222222"),
                           lobe_curve(dashed, "#b23a1f", true)},
                          1.0));
    if (!contained) {
      std::fprintf(stderr, "fig2: containment violated\n");
      return 1;
    }
    return 0;
  }
  if (name == "fig3") {
    // Strongly anisotropic pair with misaligned axes: the raw product ST
    // dips negative in the directions between the two short axes.
    auto aligned = [](double theta) {
      const double c = std::cos(theta), sn = std::sin(theta);
      Eigen::Matrix2d r;
      r << c, -sn, sn, c;
      return SpectralMatrix::from_symmetric(
          r * Eigen::Vector2d(2.0, 0.1).asDiagonal() * r.transpose());
    };
    SpectralMatrix s = aligned(0.0);
    SpectralMatrix t = aligned(M_PI / 3.0);
    if (commuting) {
      // Re-express t in the eigenbasis of s so the two curves coincide.
      const Spectrum& sp = s.spectrum();
      t = SpectralMatrix::from_symmetric(
          sp.eigenvectors * t.spectrum().eigenvalues.asDiagonal() *
          sp.eigenvectors.transpose());
    }
    Eigen::Matrix2d st = s.matrix() * t.matrix();
    SpectralMatrix odt = odot_mat(s, t);
    std::vector<double> prod(kAngles), gen(kAngles);
    std::string csv = "theta,product,odot\n";
    for (int k = 0; k < kAngles; ++k) {
      Eigen::Vector2d u = dir(k);
      prod[k] = u.dot(st * u);
      gen[k] = u.dot(odt.matrix() * u);
      csv += num(k * (2.0 * M_PI / kAngles)) + "," + num(prod[k]) + "," +
             num(gen[k]) + "\n";
    }
    write_text(out / "fig3.csv", csv);
    write_text(out / "fig3.svg",
               render_svg({lobe_curve(prod, "#222222"),
                           lobe_curve(gen, "#b23a1f", true)},
                          1.5));
    return 0;
  }
  if (name == "fig4") {
    SpectralMatrix s = random_spd(2, substream(seed, "fig4-s"), 0.2, 1.5);
    SpectralMatrix t = random_spd(2, substream(seed, "fig4-t"), 0.2, 1.5);
    std::vector<Curve> curves;
    std::string csv = "theta";
    for (int k = 0; k <= 6; ++k) {
      csv += ",st_k" + std::to_string(k) + ",ts_k" + std::to_string(k);
    }
    csv += "\n";
    std::vector<std::vector<double>> st_vals(7), ts_vals(7);
    for (int k = 0; k <= 6; ++k) {
      Eigen::Matrix2d sf = mat_power(s, std::ldexp(1.0, -k)).matrix();
      Eigen::Matrix2d tf = mat_power(t, std::ldexp(1.0, -k)).matrix();
      Eigen::Matrix2d m_st = sf * tf;
      Eigen::Matrix2d m_ts = tf * sf;
      for (int r = 0; r < k; ++r) {
        m_st = Eigen::Matrix2d(m_st * m_st);
        m_ts = Eigen::Matrix2d(m_ts * m_ts);
      }
      st_vals[k].resize(kAngles);
      ts_vals[k].resize(kAngles);
      for (int a = 0; a < kAngles; ++a) {
        Eigen::Vector2d u = dir(a);
        st_vals[k][a] = u.dot(m_st * u);
        ts_vals[k][a] = u.dot(m_ts * u);
      }
      const int shade = 40 + 28 * k;
      char color[8];
      std::snprintf(color, sizeof(color), "#%02x%02x%02x", shade, shade,
                    shade);
      curves.push_back(lobe_curve(st_vals[k], color));
      curves.push_back(lobe_curve(ts_vals[k], color, true));
    }
    curves.push_back(lobe_curve(
        [&] {
          std::vector<double> v(kAngles);
          SpectralMatrix closed = odot_mat(s, t);
          for (int a = 0; a < kAngles; ++a) {
            Eigen::Vector2d u = dir(a);
            v[a] = u.dot(closed.matrix() * u);
          }
          return v;
        }(),
        "#b23a1f", true));
    for (int a = 0; a < kAngles; ++a) {
      csv += num(a * (2.0 * M_PI / kAngles));
      for (int k = 0; k <= 6; ++k) {
        csv += "," + num(st_vals[k][a]) + "," + num(ts_vals[k][a]);
      }
      csv += "\n";
    }
    write_text(out / "fig4.csv", csv);
    write_text(out / "fig4.svg", render_svg(curves, 1.5));
    return 0;
  }
  if (name == "fig5") {
    Density prior = Density::diagonal(Eigen::Vector2d(0.9, 0.1));
    const double c = std::cos(M_PI / 4.0), sn = std::sin(M_PI / 4.0);
    Eigen::Matrix2d rot;
    rot << c, -sn, sn, c;
    SpectralMatrix likelihood = SpectralMatrix::from_symmetric(
        rot * Eigen::Vector2d(0.9, 0.1).asDiagonal() * rot.transpose());
    FlowTrace trace = bayes_iterate(prior, likelihood, 60);
    const std::vector<int> picks = {0, 1, 2, 4, 8, 16, 32, 60};
    std::vector<Curve> curves;
    std::string csv = "step,theta,x,y,overlap\n";
    int shade = 0;
    for (int p : picks) {
      const Eigen::Matrix2d m = trace.steps[p].state.mat().matrix();
      char color[8];
      std::snprintf(color, sizeof(color), "#%02x%02x%02x", 30 + shade,
                    60 + shade, 160);
      shade += 12;
      curves.push_back(ellipse_curve(m, color));
      for (int a = 0; a < kAngles; ++a) {
        Eigen::Vector2d pt = m * dir(a);
        csv += std::to_string(p) + "," + num(a * (2.0 * M_PI / kAngles)) +
               "," + num(pt(0)) + "," + num(pt(1)) + "," +
               num(trace.steps[p].overlap) + "\n";
      }
    }
    write_text(out / "fig5.csv", csv);
    write_text(out / "fig5.svg", render_svg(curves, 1.0));
    return 0;
  }
  std::fprintf(stderr, "figure: unknown name %s\n", name.c_str());
  return 2;
}

// ---------------------------------------------------------------------------
// check subcommand

struct PropertyResult {
  std::string suite;
  std::string name;
  int trials = 0;
  double worst = 0.0;
  double threshold = 0.0;
  bool pass() const { return worst <= threshold; }
};

using Sink = std::vector<PropertyResult>;

void record(Sink& sink, std::string suite, std::string name, int trials,
            double worst, double threshold) {
  sink.push_back(PropertyResult{std::move(suite), std::move(name), trials,
                                worst, threshold});
}

Density pd_density(Eigen::Index n, std::uint64_t seed) {
  SpectralMatrix p = random_spd(n, seed, 0.2, 2.0);
  return Density(SpectralMatrix::from_symmetric(p.matrix() / p.trace()));
}

JointDensity pd_joint(Eigen::Index n_a, Eigen::Index n_b,
                      std::uint64_t seed) {
  SpectralMatrix p = random_spd(n_a * n_b, seed, 0.2, 2.0);
  return JointDensity::from_matrix(
      SpectralMatrix::from_symmetric(p.matrix() / p.trace()), n_a, n_b);
}

void check_symmat(Sink& sink, std::uint64_t seed, int trials) {
  double roundtrip = 0.0, pinv = 0.0, ortho = 0.0;
  for (int i = 0; i < trials; ++i) {
    const std::uint64_t s = substream(seed, "symmat-" + std::to_string(i));
    const Eigen::Index n = 2 + i % 4;
    SpectralMatrix m = random_spd(n, s, 0.2, 2.0);
    roundtrip = std::max(
        roundtrip, (mat_exp(mat_log_plus(m)).matrix() - m.matrix()).norm());
    SpectralMatrix pi = pseudo_inverse(m);
    pinv = std::max(pinv, (m.matrix() * pi.matrix() * m.matrix() - m.matrix())
                              .norm());
    Eigen::MatrixXd q = random_orthogonal(n, s ^ 0x9e3779b9u);
    ortho = std::max(
        ortho,
        (q.transpose() * q - Eigen::MatrixXd::Identity(n, n)).norm());
  }
  record(sink, "symmat", "exp-log-roundtrip", trials, roundtrip, 1e-9);
  record(sink, "symmat", "pinv-consistency", trials, pinv, 1e-9);
  record(sink, "symmat", "orthogonal-columns", trials, ortho, 1e-10);
}

void check_gleason(Sink& sink, std::uint64_t seed, int trials) {
  double completeness = 0.0, range = 0.0, trace_one = 0.0;
  for (int i = 0; i < trials; ++i) {
    const std::uint64_t s = substream(seed, "gleason-" + std::to_string(i));
    const Eigen::Index n = 2 + i % 5;
    Density d = random_density(n, s);
    trace_one = std::max(trace_one, std::abs(d.mat().trace() - 1.0));
    Eigen::MatrixXd q = random_orthogonal(n, s ^ 0x5bd1e995u);
    double sum = 0.0;
    for (Eigen::Index c = 0; c < n; ++c) {
      const double p = prob(d, UnitVector(q.col(c)));
      range = std::max({range, -p, p - 1.0});
      sum += p;
    }
    completeness = std::max(completeness, std::abs(sum - 1.0));
  }
  record(sink, "gleason", "basis-completeness", trials, completeness, 1e-10);
  record(sink, "gleason", "probability-range", trials, range, 1e-12);
  record(sink, "gleason", "trace-one", trials, trace_one, 1e-12);
}

void check_odot(Sink& sink, std::uint64_t seed, int trials) {
  double comm = 0.0, assoc = 0.0, det = 0.0, absorb = 0.0, inv = 0.0;
  for (int i = 0; i < trials; ++i) {
    const std::uint64_t s = substream(seed, "odot-" + std::to_string(i));
    const Eigen::Index n = 2 + i % 3;
    SpectralMatrix a = random_spd(n, s, 0.2, 2.0);
    SpectralMatrix b = random_spd(n, s + 1, 0.2, 2.0);
    SpectralMatrix c = random_spd(n, s + 2, 0.2, 2.0);
    comm = std::max(comm,
                    (odot_mat(a, b).matrix() - odot_mat(b, a).matrix()).norm());
    assoc = std::max(assoc, (odot_mat(odot_mat(a, b), c).matrix() -
                             odot_mat(a, odot_mat(b, c)).matrix())
                                .norm());
    const double dr = odot_mat(a, b).matrix().determinant() -
                      a.matrix().determinant() * b.matrix().determinant();
    det = std::max(det, std::abs(dr) / std::max(1.0, std::abs(
                                                         a.matrix()
                                                                 .determinant() *
                                                         b.matrix()
                                                             .determinant())));
    UnitVector u = random_unit_vector(n, s + 3);
    const double scale =
        std::exp(u.vec().dot(mat_log_plus(a).matrix() * u.vec()));
    absorb = std::max(absorb, (odot_mat(u.dyad(), a).matrix() -
                               scale * u.vec() * u.vec().transpose())
                                  .norm());
    inv = std::max(inv, (odot_mat(a, pseudo_inverse(a)).matrix() -
                         Eigen::MatrixXd::Identity(n, n))
                            .norm());
  }
  double contain = 0.0;
  const int densities = std::min(trials, 20);
  for (int i = 0; i < densities; ++i) {
    Density a = random_density(
        2, substream(seed, "odot-contain-" + std::to_string(i)));
    for (int k = 0; k < kAngles; ++k) {
      Eigen::Vector2d u = dir(k);
      UnitVector uv{Eigen::VectorXd(u)};
      contain = std::max(contain, odot_mat(a.mat(), uv.dyad()).trace() -
                                      prob(a, uv));
    }
  }
  record(sink, "odot", "commutativity", trials, comm, 1e-9);
  record(sink, "odot", "associativity", trials, assoc, 1e-8);
  record(sink, "odot", "determinant-multiplicativity", trials, det, 1e-8);
  record(sink, "odot", "rank-one-absorption", trials, absorb, 1e-9);
  record(sink, "odot", "inverse-cancellation", trials, inv, 1e-9);
  record(sink, "odot", "lobe-containment", densities, contain, 1e-10);
}

void check_tensor(Sink& sink, std::uint64_t seed, int trials) {
  double law3 = 0.0, law4 = 0.0, mixed = 0.0, trace_keep = 0.0;
  for (int i = 0; i < trials; ++i) {
    const std::uint64_t s = substream(seed, "tensor-" + std::to_string(i));
    SpectralMatrix e = random_spd(2, s);
    SpectralMatrix f = random_spd(3, s + 1);
    SpectralMatrix g6 = random_spd(6, s + 2, -1.0, 1.5);
    SpectralMatrix e2 = random_spd(2, s + 3);
    SpectralMatrix f2 = random_spd(3, s + 4);
    // Mixed product.
    Eigen::MatrixXd lhs =
        Eigen::MatrixXd(kron(e, f).matrix()) * kron(e2, f2).matrix();
    Eigen::MatrixXd eg = e.matrix() * e2.matrix();
    Eigen::MatrixXd fh = f.matrix() * f2.matrix();
    Eigen::MatrixXd direct(6, 6);
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        direct.block(r * 3, c * 3, 3, 3) = eg(r, c) * fh;
      }
    }
    mixed = std::max(mixed, (lhs - direct).norm());
    // Law 3 and 4 via block arithmetic on the raw matrix.
    Eigen::MatrixXd gm = g6.matrix();
    Eigen::MatrixXd lift = Eigen::MatrixXd::Zero(6, 6);
    for (int r = 0; r < 2; ++r) lift.block(r * 3, r * 3, 3, 3) = f.matrix();
    Eigen::MatrixXd pr = gm * lift;
    Eigen::MatrixXd ga = Eigen::MatrixXd::Zero(3, 3);
    Eigen::MatrixXd right = Eigen::MatrixXd::Zero(3, 3);
    Eigen::MatrixXd trb(2, 2);
    for (int r = 0; r < 2; ++r) {
      ga += gm.block(r * 3, r * 3, 3, 3);
      right += pr.block(r * 3, r * 3, 3, 3);
      for (int c = 0; c < 2; ++c) {
        trb(r, c) = pr.block(r * 3, c * 3, 3, 3).trace();
      }
    }
    law3 = std::max(law3, (right - ga * f.matrix()).norm());
    Eigen::MatrixXd ef = Eigen::MatrixXd::Zero(6, 6);
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        ef.block(r * 3, c * 3, 3, 3) = e.matrix()(r, c) * f.matrix();
      }
    }
    law4 = std::max(law4, std::abs((gm * ef).trace() -
                                   (trb * e.matrix()).trace()));
    trace_keep = std::max(
        trace_keep,
        std::abs(partial_trace(g6, 2, 3, TraceSide::over_a).trace() -
                 g6.trace()));
  }
  record(sink, "tensor", "partial-trace-law-3", trials, law3, 1e-10);
  record(sink, "tensor", "partial-trace-law-4", trials, law4, 1e-10);
  record(sink, "tensor", "mixed-product", trials, mixed, 1e-10);
  record(sink, "tensor", "trace-preservation", trials, trace_keep, 1e-12);
}

void check_conditional(Sink& sink, std::uint64_t seed, int trials) {
  double recon = 0.0, triangle = 0.0, witness = 0.0;
  for (int i = 0; i < trials; ++i) {
    const std::uint64_t s =
        substream(seed, "conditional-" + std::to_string(i));
    JointDensity j = pd_joint(2, 2, s);
    FullConditional c = cond_full(j);
    SpectralMatrix lifted =
        kron(SpectralMatrix::identity(2), marginal_b(j).mat());
    recon = std::max(
        recon, (odot_mat(c.matrix, lifted).matrix() - j.mat().matrix())
                   .norm());
    UnitVector a = random_unit_vector(2, s + 1);
    UnitVector b = random_unit_vector(2, s + 2);
    const double scalar = cond_scalar(j, a, b);
    triangle = std::max(
        triangle,
        std::abs(scalar - marginalize_cond(cond_given_b(j, b), a)));
    triangle = std::max(
        triangle,
        std::abs(scalar - joint_prob(j, a, b) / prob(marginal_b(j), b)));
    std::vector<UnitVector> adirs, bdirs;
    for (int k = 0; k < 3; ++k) {
      adirs.push_back(random_unit_vector(2, s + 10 + k));
      bdirs.push_back(random_unit_vector(2, s + 20 + k));
    }
    witness = std::max(
        witness,
        separability_witness(separable_joint({0.2, 0.5, 0.3}, adirs, bdirs)) -
            1.0);
  }
  record(sink, "conditional", "reconstruction", trials, recon, 1e-8);
  record(sink, "conditional", "consistency-triangle", trials, triangle, 1e-10);
  record(sink, "conditional", "witness-soundness", trials, witness, 1e-8);
}

void check_bayes(Sink& sink, std::uint64_t seed, int trials) {
  double norm_res = 0.0, scale_inv = 0.0, tight = 0.0, chains = 0.0;
  for (int i = 0; i < trials; ++i) {
    const std::uint64_t s = substream(seed, "bayes-" + std::to_string(i));
    const Eigen::Index n = 2 + i % 4;
    Density prior = pd_density(n, s);
    SpectralMatrix l = random_spd(n, s + 1, 0.2, 2.0);
    BayesUpdate up = bayes_main(prior, l);
    norm_res = std::max(norm_res, std::abs(up.posterior.mat().trace() - 1.0));
    BayesUpdate scaled = bayes_main(
        prior, SpectralMatrix::from_symmetric(3.7 * l.matrix()));
    scale_inv = std::max(scale_inv, (scaled.posterior.mat().matrix() -
                                     up.posterior.mat().matrix())
                                        .norm());
    BoundReport rep = bound_report(prior, l);
    chains = std::max({chains, rep.nll_evidence - rep.nll_map,
                       rep.prob_evidence - rep.prob_trace_product,
                       rep.prob_trace_product - rep.prob_bound});
    // Commuting pair: the Golden-Thompson link is tight.
    Eigen::MatrixXd q = random_orthogonal(n, s + 2);
    std::mt19937_64 rng(s + 3);
    std::uniform_real_distribution<double> unif(0.1, 2.0);
    Eigen::VectorXd pe(n), le(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      pe(k) = unif(rng);
      le(k) = unif(rng);
    }
    Density cp(SpectralMatrix::from_symmetric(
        q * (pe / pe.sum()).asDiagonal() * q.transpose()));
    SpectralMatrix cl =
        SpectralMatrix::from_symmetric(q * le.asDiagonal() * q.transpose());
    BoundReport tight_rep = bound_report(cp, cl);
    tight = std::max(tight, std::abs(tight_rep.prob_evidence -
                                     tight_rep.prob_trace_product));
  }
  record(sink, "bayes", "posterior-normalization", trials, norm_res, 1e-12);
  record(sink, "bayes", "likelihood-scale-invariance", trials, scale_inv,
         1e-12);
  record(sink, "bayes", "bound-chains", trials, chains, 1e-9);
  record(sink, "bayes", "commuting-bound-tightness", trials, tight, 1e-9);
}

void check_em(Sink& sink, std::uint64_t seed, int trials) {
  double fixed_point = 0.0, trace_one = 0.0;
  for (int i = 0; i < trials; ++i) {
    const std::uint64_t s = substream(seed, "em-" + std::to_string(i));
    JointDensity j = pd_joint(2, 2, s);
    FullConditional c = cond_full(j);
    Density truth = marginal_b(j);
    Density stepped = em_step(c, truth);
    fixed_point = std::max(
        fixed_point, (stepped.mat().matrix() - truth.mat().matrix()).norm());
    trace_one = std::max(trace_one, std::abs(stepped.mat().trace() - 1.0));
  }
  record(sink, "em_invert", "fixed-point", trials, fixed_point, 1e-9);
  record(sink, "em_invert", "trace-preservation", trials, trace_one, 1e-12);
}

void check_dynamics(Sink& sink, std::uint64_t seed, int trials) {
  double ode_gap = 0.0, spectrum_keep = 0.0, t1_gap = 0.0;
  const int heavy = std::max(3, trials / 20);
  for (int i = 0; i < heavy; ++i) {
    const std::uint64_t s = substream(seed, "dynamics-" + std::to_string(i));
    Density prior = pd_density(3, s);
    SpectralMatrix l = random_spd(3, s + 1, 0.2, 2.0);
    Density closed = flow_generalized(prior, l, 1.0);
    ode_gap = std::max(
        ode_gap, (integrate_log_ode(prior, l, 1.0, 1000).final_state()
                      .mat()
                      .matrix() -
                  closed.mat().matrix())
                     .norm());
    t1_gap = std::max(t1_gap, (closed.mat().matrix() -
                               bayes_main(prior, l).posterior.mat().matrix())
                                  .norm());
  }
  for (int i = 0; i < trials; ++i) {
    const std::uint64_t s =
        substream(seed, "dynamics-conj-" + std::to_string(i));
    Density d = pd_density(3, s);
    std::mt19937_64 rng(s + 7);
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd g(3, 3);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) g(r, c) = gauss(rng);
    }
    Density moved = conjugate_flow(d, g - g.transpose(), 0.8);
    spectrum_keep = std::max(spectrum_keep,
                             (moved.mat().spectrum().eigenvalues -
                              d.mat().spectrum().eigenvalues)
                                 .norm());
  }
  record(sink, "dynamics", "ode-vs-closed", heavy, ode_gap, 1e-6);
  record(sink, "dynamics", "flow-t1-equals-posterior", heavy, t1_gap, 1e-10);
  record(sink, "dynamics", "conjugation-spectrum", trials, spectrum_keep,
         1e-10);
}

int cmd_check(const std::string& suite, std::uint64_t seed, int trials,
              bool inject_bad, const fs::path& out) {
  Sink sink;
  const std::vector<std::pair<std::string,
                              void (*)(Sink&, std::uint64_t, int)>> suites = {
      {"symmat", check_symmat},     {"gleason", check_gleason},
      {"odot", check_odot},         {"tensor", check_tensor},
      {"conditional", check_conditional}, {"bayes", check_bayes},
      {"em_invert", check_em},      {"dynamics", check_dynamics},
  };
  bool matched = false;
  for (const auto& [name, fn] : suites) {
    if (suite == "all" || suite == name) {
      fn(sink, seed, trials);
      matched = true;
    }
  }
  if (!matched) {
    std::fprintf(stderr, "check: unknown suite %s\n", suite.c_str());
    return 2;
  }
  if (inject_bad) {
    // Harness sanity: a density with trace 1.1 violates the trace-one
    // invariant by 0.1.
    record(sink, "inject", "density-trace-one", 1, 0.1, 1e-8);
  }
  json report;
  report["seed"] = seed;
  report["suite"] = suite;
  report["trials"] = trials;
  report["properties"] = json::array();
  int failures = 0;
  for (const PropertyResult& r : sink) {
    json p;
    p["suite"] = r.suite;
    p["name"] = r.name;
    p["trials"] = r.trials;
    p["worst_residual"] = r.worst;
    p["threshold"] = r.threshold;
    p["pass"] = r.pass();
    report["properties"].push_back(p);
    std::printf("[%s] %s/%s worst=%.3e threshold=%.1e\n",
                r.pass() ? "PASS" : "FAIL", r.suite.c_str(), r.name.c_str(),
                r.worst, r.threshold);
    if (!r.pass()) ++failures;
  }
  report["failures"] = failures;
  fs::create_directories(out);
  io::save_json(report, (out / "check_report.json").string());
  return failures == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// runner subcommands

int cmd_bayes(const std::string& prior_path, const std::string& lik_path,
              const fs::path& out) {
  Density prior = io::density_from_json(io::load_json(prior_path));
  SpectralMatrix l = io::matrix_from_json(io::load_json(lik_path));
  BayesUpdate up = bayes_main(prior, l);
  fs::create_directories(out);
  io::save_json(io::bayes_update_to_json(up), (out / "bayes.json").string());
  std::printf("evidence %.12g\n", up.evidence);
  return 0;
}

int cmd_em(const std::string& cond_path, const std::string& start,
           double tol, int max_iter, const fs::path& out) {
  FullConditional c = io::conditional_from_json(io::load_json(cond_path));
  Density w = start == "uniform"
                  ? Density::uniform(c.n_b)
                  : io::density_from_json(io::load_json(start));
  fs::create_directories(out);
  std::string csv = "iteration,step_norm,evidence_trace\n";
  InversionResult result{w, 0, 0.0, false, std::nullopt, {}};
  for (int t = 0; t < max_iter; ++t) {
    SpectralMatrix lifted = kron(SpectralMatrix::identity(c.n_a), w.mat());
    SpectralMatrix joint = odot_mat(c.matrix, lifted);
    const double mass = joint.trace();
    Density next = em_step(c, w);
    const double step = (next.mat().matrix() - w.mat().matrix()).norm();
    csv += std::to_string(t + 1) + "," + num(step) + "," + num(mass) + "\n";
    result.step_norms.push_back(step);
    result.final_step_norm = step;
    result.iterations = t + 1;
    w = next;
    if (step <= tol) {
      result.converged = true;
      break;
    }
  }
  result.estimate = w;
  if (result.converged) {
    SpectralMatrix lifted = kron(SpectralMatrix::identity(c.n_a), w.mat());
    SpectralMatrix joint = odot_mat(c.matrix, lifted);
    result.reconstructed_joint = JointDensity::from_matrix(
        SpectralMatrix::from_symmetric(joint.matrix() / joint.trace()),
        c.n_a, c.n_b);
  }
  write_text(out / "em.csv", csv);
  io::save_json(io::inversion_result_to_json(result),
                (out / "em.json").string());
  std::printf("%s after %d iterations (last step %.3e)\n",
              result.converged ? "converged" : "not converged",
              result.iterations, result.final_step_norm);
  return 0;
}

int cmd_flow(const std::string& prior_path, const std::string& lik_path,
             const std::string& skew_path, double t_end, int steps,
             const std::string& mode, const fs::path& out) {
  Density prior = io::density_from_json(io::load_json(prior_path));
  fs::create_directories(out);
  FlowTrace trace;
  if (mode == "ode" || mode == "closed") {
    if (lik_path.empty()) {
      std::fprintf(stderr, "flow: --likelihood required for mode %s\n",
                   mode.c_str());
      return 2;
    }
    SpectralMatrix l = io::matrix_from_json(io::load_json(lik_path));
    if (mode == "ode") {
      trace = integrate_log_ode(prior, l, t_end, steps);
    } else {
      Density state = prior;
      for (int k = 0; k <= steps; ++k) {
        const double t = t_end * k / steps;
        Density next = flow_generalized(prior, l, t);
        const double step_norm =
            k == 0 ? 0.0
                   : (next.mat().matrix() - state.mat().matrix()).norm();
        const double overlap =
            std::abs(next.mat().spectrum().eigenvectors.col(0).dot(
                l.spectrum().eigenvectors.col(0)));
        state = next;
        trace.steps.push_back(FlowStep{t, state, 0.0, overlap, step_norm});
      }
    }
  } else if (mode == "conjugate") {
    if (skew_path.empty()) {
      std::fprintf(stderr, "flow: --skew required for mode conjugate\n");
      return 2;
    }
    Eigen::MatrixXd k_raw(0, 0);
    {
      json doc = io::load_json(skew_path);
      const Eigen::Index n = doc.at("n").get<Eigen::Index>();
      const auto data = doc.at("data").get<std::vector<double>>();
      if (static_cast<Eigen::Index>(data.size()) != n * n) {
        throw IoError("skew JSON: data length mismatch");
      }
      k_raw.resize(n, n);
      for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) {
          k_raw(r, c) = data[static_cast<std::size_t>(r * n + c)];
        }
      }
    }
    Density state = prior;
    const Eigen::VectorXd ref = prior.mat().spectrum().eigenvectors.col(0);
    for (int k = 0; k <= steps; ++k) {
      const double t = t_end * k / steps;
      Density next = conjugate_flow(prior, k_raw, t);
      const double step_norm =
          k == 0 ? 0.0 : (next.mat().matrix() - state.mat().matrix()).norm();
      const double overlap =
          std::abs(next.mat().spectrum().eigenvectors.col(0).dot(ref));
      state = next;
      trace.steps.push_back(FlowStep{t, state, 0.0, overlap, step_norm});
    }
  } else {
    std::fprintf(stderr, "flow: unknown mode %s\n", mode.c_str());
    return 2;
  }
  const Eigen::Index n = prior.dim();
  std::string csv = "t";
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      csv += ",m" + std::to_string(r) + std::to_string(c);
    }
  }
  csv += ",overlap,trace_drift,step_norm\n";
  for (const FlowStep& s : trace.steps) {
    csv += num(s.time);
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < n; ++c) {
        csv += "," + num(s.state.mat().matrix()(r, c));
      }
    }
    csv += "," + num(s.overlap) + "," + num(s.trace_drift) + "," +
           num(s.step_norm) + "\n";
  }
  write_text(out / "flow.csv", csv);
  json summary;
  summary["mode"] = mode;
  summary["t_end"] = t_end;
  summary["steps"] = steps;
  summary["final_state"] = io::density_to_json(trace.final_state());
  if (mode == "ode") {
    SpectralMatrix l = io::matrix_from_json(io::load_json(lik_path));
    summary["gap_to_closed_form"] =
        (trace.final_state().mat().matrix() -
         flow_generalized(prior, l, t_end).mat().matrix())
            .norm();
  }
  io::save_json(summary, (out / "flow.json").string());
  return 0;
}

int cmd_odot(const std::string& s_path, const std::string& t_path, int lie_k,
             const fs::path& out) {
  SpectralMatrix s = io::matrix_from_json(io::load_json(s_path));
  SpectralMatrix t = io::matrix_from_json(io::load_json(t_path));
  OdotResult r = odot(s, t);
  json doc;
  doc["matrix"] = io::matrix_to_json(r.matrix);
  doc["common_range_dim"] = r.common_range_dim;
  doc["used_limit_form"] = r.used_limit_form;
  if (lie_k >= 0) {
    LieLimitResult lie = odot_lie_limit(s, t, lie_k);
    doc["lie"]["k"] = lie_k;
    doc["lie"]["matrix"] = io::matrix_to_json(lie.matrix);
    doc["lie"]["asymmetry"] = lie.asymmetry;
    doc["lie"]["gap_to_closed"] =
        (lie.matrix.matrix() - r.matrix.matrix()).norm();
  }
  fs::create_directories(out);
  io::save_json(doc, (out / "odot.json").string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"density matrix probability calculus"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::string out_dir = ".";
  double tol = 1e-10;
  app.add_option("--seed", seed, "master random seed");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--tol", tol, "tolerance override for iterative runners");

  auto* figure = app.add_subcommand("figure", "reproduce a figure");
  std::string fig_name;
  bool commuting = false;
  figure->add_option("name", fig_name, "fig1|fig2|fig3|fig4|fig5")
      ->required();
  figure->add_flag("--commuting", commuting,
                   "use a commuting pair for fig3");

  auto* check = app.add_subcommand("check", "run the property suites");
  std::string suite = "all";
  int trials = 100;
  bool inject_bad = false;
  check->add_option("--suite", suite, "all or a module name");
  check->add_option("--trials", trials, "trials per property");
  check->add_flag("--inject-bad", inject_bad,
                  "add a deliberately failing invariant");

  auto* bayes = app.add_subcommand("bayes", "one generalized update");
  std::string prior_path, lik_path;
  bayes->add_option("--prior", prior_path)->required();
  bayes->add_option("--likelihood", lik_path)->required();

  auto* em = app.add_subcommand("em", "fixed-point marginal inversion");
  std::string cond_path, start = "uniform";
  int max_iter = 10000;
  em->add_option("--conditional", cond_path)->required();
  em->add_option("--start", start, "density JSON path or 'uniform'");
  em->add_option("--max-iter", max_iter);

  auto* flow = app.add_subcommand("flow", "posterior flows");
  std::string flow_prior, flow_lik, skew_path, mode = "closed";
  double t_end = 1.0;
  int steps = 100;
  flow->add_option("--prior", flow_prior)->required();
  flow->add_option("--likelihood", flow_lik);
  flow->add_option("--skew", skew_path, "skew generator JSON (conjugate)");
  flow->add_option("--t", t_end);
  flow->add_option("--steps", steps);
  flow->add_option("--mode", mode, "closed|ode|conjugate");

  auto* odot_cmd = app.add_subcommand("odot", "evaluate the product");
  std::string s_path, t_path;
  int lie_k = -1;
  odot_cmd->add_option("--s", s_path)->required();
  odot_cmd->add_option("--t", t_path)->required();
  odot_cmd->add_option("--lie-k", lie_k,
                       "also evaluate the limit formula at this depth");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const fs::path out(out_dir);
  try {
    if (figure->parsed()) return cmd_figure(fig_name, out, seed, commuting);
    if (check->parsed()) {
      return cmd_check(suite, seed, trials, inject_bad, out);
    }
    if (bayes->parsed()) return cmd_bayes(prior_path, lik_path, out);
    if (em->parsed()) return cmd_em(cond_path, start, tol, max_iter, out);
    if (flow->parsed()) {
      return cmd_flow(flow_prior, flow_lik, skew_path, t_end, steps, mode,
                      out);
    }
    if (odot_cmd->parsed()) return cmd_odot(s_path, t_path, lie_k, out);
  } catch (const IoError& e) {
    std::fprintf(stderr, "IoError: %s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  }
  return 2;
}
