#include "dmcalc/io.hpp"

#include <fstream>

namespace dmcalc::io {

namespace {

std::vector<double> flatten(const Eigen::MatrixXd& m) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out.push_back(m(i, j));
    }
  }
  return out;
}

Eigen::MatrixXd unflatten(const json& j) {
  if (!j.contains("n") || !j.contains("data")) {
    throw IoError("matrix JSON needs \"n\" and \"data\" fields");
  }
  const Eigen::Index n = j.at("n").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(data.size()) != n * n) {
    throw IoError("matrix JSON: data length " + std::to_string(data.size()) +
                  " != n*n");
  }
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index c = 0; c < n; ++c) {
      m(i, c) = data[static_cast<std::size_t>(i * n + c)];
    }
  }
  return m;
}

}  // namespace

json matrix_to_json(const SpectralMatrix& m, const std::string& kind) {
  json j;
  j["n"] = m.dim();
  if (!kind.empty()) {
    j["kind"] = kind;
  }
  j["data"] = flatten(m.matrix());
  return j;
}

SpectralMatrix matrix_from_json(const json& j) {
  return SpectralMatrix::from_raw(unflatten(j));
}

json density_to_json(const Density& d) {
  return matrix_to_json(d.mat(), "density");
}

Density density_from_json(const json& j) {
  return Density(matrix_from_json(j));
}

json joint_to_json(const JointDensity& j) {
  json doc = matrix_to_json(j.mat(), "density");
  doc["dims"] = {j.dim_a(), j.dim_b()};
  return doc;
}

JointDensity joint_from_json(const json& j) {
  if (!j.contains("dims")) {
    throw IoError("joint density JSON needs a \"dims\" field");
  }
  const auto dims = j.at("dims").get<std::vector<Eigen::Index>>();
  if (dims.size() != 2) {
    throw IoError("joint density JSON: dims must have two entries");
  }
  return JointDensity::from_matrix(matrix_from_json(j), dims[0], dims[1]);
}

json unit_vector_to_json(const UnitVector& u) {
  json j;
  j["v"] = std::vector<double>(u.vec().data(), u.vec().data() + u.dim());
  return j;
}

UnitVector unit_vector_from_json(const json& j) {
  if (!j.contains("v")) {
    throw IoError("unit vector JSON needs a \"v\" field");
  }
  const auto data = j.at("v").get<std::vector<double>>();
  Eigen::VectorXd v =
      Eigen::Map<const Eigen::VectorXd>(data.data(), data.size());
  return UnitVector(std::move(v));
}

json conditional_to_json(const FullConditional& c) {
  json doc = matrix_to_json(c.matrix);
  doc["dims"] = {c.n_a, c.n_b};
  doc["degenerate_marginal"] = c.degenerate_marginal;
  return doc;
}

FullConditional conditional_from_json(const json& j) {
  if (!j.contains("dims")) {
    throw IoError("conditional JSON needs a \"dims\" field");
  }
  const auto dims = j.at("dims").get<std::vector<Eigen::Index>>();
  if (dims.size() != 2) {
    throw IoError("conditional JSON: dims must have two entries");
  }
  SpectralMatrix m = matrix_from_json(j);
  if (m.dim() != dims[0] * dims[1]) {
    throw IoError("conditional JSON: matrix dimension does not match dims");
  }
  return FullConditional{m, dims[0], dims[1],
                         j.value("degenerate_marginal", false)};
}

json bayes_update_to_json(const BayesUpdate& u) {
  json j;
  j["prior"] = density_to_json(u.prior);
  j["likelihood"] = matrix_to_json(u.likelihood);
  j["posterior"] = density_to_json(u.posterior);
  j["evidence"] = u.evidence;
  return j;
}

json inversion_result_to_json(const InversionResult& r) {
  json j;
  j["estimate"] = density_to_json(r.estimate);
  j["iterations"] = r.iterations;
  j["final_step_norm"] = r.final_step_norm;
  j["converged"] = r.converged;
  if (r.reconstructed_joint) {
    j["reconstructed_joint"] = joint_to_json(*r.reconstructed_joint);
  }
  return j;
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path);
  }
  json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("cannot parse " + path + ": " + e.what());
  }
  return j;
}

void save_json(const json& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write " + path);
  }
  out << doc.dump(2) << "\n";
}

}  // namespace dmcalc::io
