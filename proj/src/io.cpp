#include "vqt/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "vqt/error.hpp"

namespace vqt::io {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back(Json{{"re", m(i, j).real()}, {"im", m(i, j).imag()}});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw InvalidInput("matrix must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  ComplexMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = j[r];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw InvalidInput("matrix rows must all have the same length");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const Json& e = row[c];
      if (e.is_number()) {
        m(r, c) = e.get<double>();
      } else if (e.is_object() && e.contains("re") && e.contains("im")) {
        m(r, c) = Complex(e.at("re").get<double>(), e.at("im").get<double>());
      } else {
        throw InvalidInput("matrix entries must be numbers or {re, im} objects");
      }
    }
  }
  return m;
}

Json real_vector_to_json(const RealVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json projector_set_to_json(const ProjectorSet& ps) {
  Json classes = Json::array();
  for (const auto& u : ps.classes()) classes.push_back(matrix_to_json(u));
  return Json{{"dim", ps.dim()},
              {"classes", std::move(classes)},
              {"metadata",
               {{"construction", ps.info().construction},
                {"field_polynomial", ps.info().field_polynomial}}}};
}

ProjectorSet projector_set_from_json(const Json& j) {
  try {
    const auto dim = j.at("dim").get<Eigen::Index>();
    std::vector<ComplexMatrix> classes;
    for (const auto& c : j.at("classes")) classes.push_back(matrix_from_json(c));
    ConstructionInfo info;
    if (j.contains("metadata")) {
      const Json& meta = j.at("metadata");
      info.construction = meta.value("construction", "");
      info.field_polynomial = meta.value("field_polynomial", "");
    }
    return ProjectorSet(dim, std::move(classes), std::move(info));
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("malformed projector set: ") + e.what());
  }
}

void write_records_csv(std::ostream& out, const std::vector<MeasurementRecord>& records) {
  out << "lambda,frequency,epsilon\n";
  for (const auto& r : records) {
    out << r.lambda << ',' << format_double(r.frequency) << ',' << format_double(r.epsilon) << '\n';
  }
}

namespace {

double parse_field(const std::string& s, int line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) {
    throw InvalidInput("records line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<MeasurementRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "lambda,frequency,epsilon") {
    throw InvalidInput("records CSV must start with the header lambda,frequency,epsilon");
  }
  std::vector<MeasurementRecord> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(trim(f));
    if (fields.size() != 3) {
      throw InvalidInput("records line " + std::to_string(line_no) + ": expected 3 fields");
    }
    const double lambda = parse_field(fields[0], line_no);
    if (lambda < 0 || lambda != std::floor(lambda)) {
      throw InvalidInput("records line " + std::to_string(line_no) + ": lambda must be a nonnegative integer");
    }
    MeasurementRecord r{static_cast<int>(lambda), parse_field(fields[1], line_no),
                        parse_field(fields[2], line_no)};
    if (r.frequency < 0.0 || r.epsilon < 0.0) {
      throw InvalidInput("records line " + std::to_string(line_no) + ": negative value");
    }
    out.push_back(r);
  }
  return out;
}

Json density_to_json(const DensityMatrix& rho) {
  return Json{{"dim", rho.dim()}, {"matrix", matrix_to_json(rho.matrix())}};
}

DensityMatrix density_from_json(const Json& j) {
  const Json& m = j.is_object() ? j.at("matrix") : j;
  return DensityMatrix(matrix_from_json(m));
}

Json tomography_result_to_json(const TomographyResult& result) {
  Json diag = nullptr;
  if (result.diagnostics) {
    const auto& d = *result.diagnostics;
    diag = Json{{"purity", d.purity}, {"fidelity", d.fidelity}, {"trace_distance", d.trace_distance}};
    diag["witnessed_entanglement"] =
        d.witnessed_entanglement ? Json(*d.witnessed_entanglement) : Json(nullptr);
  }
  return Json{{"estimate", matrix_to_json(result.estimate.matrix())},
              {"deltas", real_vector_to_json(result.deltas)},
              {"cost", result.cost},
              {"objective", result.objective},
              {"status", sdp::to_string(result.solver_status)},
              {"certified", result.certified},
              {"iterations", result.iterations},
              {"incompatible", result.incompatible},
              {"diagnostics", std::move(diag)}};
}

Json witness_result_to_json(const WitnessResult& result) {
  return Json{{"witness", matrix_to_json(result.witness.matrix())},
              {"value", result.value},
              {"entanglement", result.entanglement},
              {"p", matrix_to_json(result.p)},
              {"q", matrix_to_json(result.q)},
              {"gap", result.gap},
              {"status", sdp::to_string(result.status)}};
}

namespace {

Json functional_to_json(const sdp::LinearFunctional& f) {
  return Json{{"psd", f.psd.size() > 0 ? matrix_to_json(f.psd) : Json::array()},
              {"nonneg", real_vector_to_json(f.nonneg)}};
}

}  // namespace

Json conic_program_to_json(const sdp::ConicProgram& program) {
  Json eq = Json::array();
  for (const auto& e : program.equalities) {
    eq.push_back(Json{{"f", functional_to_json(e.f)}, {"rhs", e.rhs}});
  }
  Json in = Json::array();
  for (const auto& i : program.inequalities) {
    in.push_back(Json{{"f", functional_to_json(i.f)},
                      {"rhs", i.rhs},
                      {"sense", i.sense == sdp::Sense::GreaterEqual ? ">=" : "<="}});
  }
  return Json{{"psd_dim", program.psd_dim},
              {"nonneg_count", program.nonneg_count},
              {"objective", functional_to_json(program.objective)},
              {"equalities", std::move(eq)},
              {"inequalities", std::move(in)}};
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path);
  out << contents;
  if (!out) throw InvalidInput("error while writing " + path);
}

Json read_json_file(const std::string& path) {
  try {
    return Json::parse(read_text_file(path));
  } catch (const Json::parse_error& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

}  // namespace vqt::io
