#include <doctest.h>

#include <cmath>
#include <sstream>

#include "generators.hpp"
#include "vqt/bases.hpp"
#include "vqt/error.hpp"
#include "vqt/io.hpp"
#include "vqt/states.hpp"
#include "vqt/tomography.hpp"
#include "vqt/witness.hpp"

using namespace vqt;

TEST_SUITE("io") {

TEST_CASE("doubles keep 17 significant digits") {
  CHECK(io::format_double(0.1) == "0.10000000000000001");
  CHECK(io::format_double(1.0) == "1");
  const double x = 1.0 / 3.0;
  CHECK(std::stod(io::format_double(x)) == x);
}

TEST_CASE("matrix JSON round trip") {
  gen::Rng rng(81);
  const ComplexMatrix m = rng.gaussian(3, 2);
  CHECK(io::matrix_from_json(io::matrix_to_json(m)) == m);
  CHECK(io::matrix_from_json(io::Json::parse("[[1, 2], [3, 4]]"))(1, 0) == Complex(3, 0));
  CHECK_THROWS_AS(io::matrix_from_json(io::Json::parse("[[1, 2], [3]]")), InvalidInput);
  CHECK_THROWS_AS(io::matrix_from_json(io::Json::parse("[]")), InvalidInput);
  CHECK_THROWS_AS(io::matrix_from_json(io::Json::parse("[[\"a\"]]")), InvalidInput);
}

TEST_CASE("projector set JSON round trip") {
  const auto ps = mub(4);
  const auto j = io::projector_set_to_json(ps);
  CHECK(j.at("dim") == 4);
  CHECK(j.at("classes").size() == 5);
  CHECK(j.at("metadata").at("field_polynomial") == ps.info().field_polynomial);
  const auto back = io::projector_set_from_json(io::Json::parse(j.dump()));
  CHECK(back.size() == ps.size());
  CHECK(back.info().construction == ps.info().construction);
  for (int c = 0; c < ps.num_classes(); ++c) CHECK(back.class_basis(c) == ps.class_basis(c));
  CHECK_THROWS_AS(io::projector_set_from_json(io::Json::parse("{\"dim\": 2}")), InvalidInput);
}

TEST_CASE("records CSV round trip is exact") {
  const RealVector p = exact_probabilities(random_density(9, 9, 4), mub(9));
  const auto recs = noisy_frequencies(p, {NoiseKind::UniformMultiplicative, 0.5, 3});
  std::stringstream ss;
  io::write_records_csv(ss, recs);
  const std::string text = ss.str();
  CHECK(text.rfind("lambda,frequency,epsilon\n", 0) == 0);
  std::istringstream in(text);
  CHECK(io::read_records_csv(in) == recs);
}

TEST_CASE("records CSV rejects malformed input") {
  auto parse = [](const std::string& s) {
    std::istringstream in(s);
    return io::read_records_csv(in);
  };
  CHECK_THROWS_AS(parse("lambda,freq\n"), InvalidInput);
  CHECK_THROWS_AS(parse("lambda,frequency,epsilon\n1,0.5\n"), InvalidInput);
  CHECK_THROWS_AS(parse("lambda,frequency,epsilon\n1.5,0.5,0\n"), InvalidInput);
  CHECK_THROWS_AS(parse("lambda,frequency,epsilon\n-1,0.5,0\n"), InvalidInput);
  CHECK_THROWS_AS(parse("lambda,frequency,epsilon\n1,nan,0\n"), InvalidInput);
  CHECK_THROWS_AS(parse("lambda,frequency,epsilon\n1,-0.5,0\n"), InvalidInput);
  CHECK_THROWS_AS(parse("lambda,frequency,epsilon\n1,0.5x,0\n"), InvalidInput);
  CHECK(parse("lambda,frequency,epsilon\r\n\n2, 0.25 ,0\n").size() == 1);
}

TEST_CASE("density JSON round trip") {
  const DensityMatrix rho = random_density(3, 2, 9);
  const auto back = io::density_from_json(io::Json::parse(io::density_to_json(rho).dump()));
  CHECK(back.matrix() == rho.matrix());
  CHECK_THROWS(io::density_from_json(io::Json::parse("[[1, 0], [0, 1]]")));
}

TEST_CASE("result JSON carries every field") {
  const auto ps = std::make_shared<const ProjectorSet>(mub(4));
  const DensityMatrix truth = random_density(4, 4, 2);
  const RealVector p = exact_probabilities(truth, *ps);
  ReconstructOptions options;
  options.witness_dims = BipartiteDims{2, 2};
  const auto r = reconstruct(TomographyProblem::from_records(ps, noisy_frequencies(p, {})), options, truth);
  const auto j = io::tomography_result_to_json(r);
  for (const char* key : {"estimate", "deltas", "cost", "objective", "status", "certified", "iterations",
                          "incompatible", "diagnostics"}) {
    CHECK(j.contains(key));
  }
  CHECK(j.at("status") == "Optimal");
  CHECK(j.at("diagnostics").at("trace_distance").get<double>() <= 1e-6);
  CHECK(j.at("deltas").size() == 20);

  const auto w = io::witness_result_to_json(decomposable_witness(truth, {2, 2}));
  CHECK(w.contains("witness"));
  CHECK(w.at("entanglement").get<double>() <= 0.0);
}

TEST_CASE("conic program dump") {
  const auto ps = std::make_shared<const ProjectorSet>(mub(2));
  const auto prog = assemble_sdp(TomographyProblem::from_records(ps, {{0, 0.5, 0.1}}));
  const auto j = io::conic_program_to_json(prog);
  CHECK(j.at("psd_dim") == 2);
  CHECK(j.at("equalities").size() == 1);
  CHECK(j.at("inequalities").size() == 2);
  CHECK(j.at("inequalities")[1].at("sense") == "<=");
}

}  // TEST_SUITE
