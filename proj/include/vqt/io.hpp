#pragma once

// File formats: projector sets and matrices as JSON, measurement records as
// CSV, and JSON reports for reconstructions, witnesses and conic programs.

#include <iosfwd>
#include <json.hpp>
#include <string>
#include <vector>

#include "vqt/bases.hpp"
#include "vqt/linalg.hpp"
#include "vqt/sdp.hpp"
#include "vqt/states.hpp"
#include "vqt/tomography.hpp"
#include "vqt/witness.hpp"

namespace vqt::io {

using Json = nlohmann::ordered_json;

/// Decimal with 17 significant digits.
std::string format_double(double v);

/// Rows of {re, im} objects.
Json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j);

Json real_vector_to_json(const RealVector& v);

/// {dim, classes: [d x d matrices whose columns are the basis vectors],
///  metadata: {construction, field_polynomial}}.
Json projector_set_to_json(const ProjectorSet& ps);
ProjectorSet projector_set_from_json(const Json& j);

/// CSV with header `lambda,frequency,epsilon`, lambda 0-based.
void write_records_csv(std::ostream& out, const std::vector<MeasurementRecord>& records);
std::vector<MeasurementRecord> read_records_csv(std::istream& in);

/// {"dim", "matrix"}; the matrix must be a valid density matrix on reading.
Json density_to_json(const DensityMatrix& rho);
DensityMatrix density_from_json(const Json& j);

Json tomography_result_to_json(const TomographyResult& result);
Json witness_result_to_json(const WitnessResult& result);

/// Debug dump of a program: objective and every constraint as nested arrays.
Json conic_program_to_json(const sdp::ConicProgram& program);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& contents);
Json read_json_file(const std::string& path);

}  // namespace vqt::io
