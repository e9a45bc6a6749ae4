#include <catch2/catch_amalgamated.hpp>
#include <filesystem>

#include "covsel/io.hpp"
#include "covsel/simulate.hpp"

using namespace covsel;

namespace {

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "covsel_io_test";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("dataset CSV round trip is bit exact") {
  GraphModelSpec spec;
  spec.p = 6;
  spec.edge_prob = 0.3;
  spec.seed = 2;
  Experiment exp = make_experiment(spec, 17, 2);
  const auto path = (temp_dir() / "data.csv").string();
  write_dataset_csv(path, exp.data);
  Dataset back = read_dataset_csv(path);
  REQUIRE(back.n() == exp.data.n());
  REQUIRE(back.p() == exp.data.p());
  REQUIRE(back.column_names == exp.data.column_names);
  REQUIRE((back.values.array() == exp.data.values.array()).all());
}

TEST_CASE("CSV reader rejects malformed input") {
  const auto dir = temp_dir();
  const auto ragged = (dir / "ragged.csv").string();
  atomic_write_file(ragged, "a,b\n1,2\n3\n");
  REQUIRE_THROWS_AS(read_dataset_csv(ragged), std::invalid_argument);
  const auto bad = (dir / "bad.csv").string();
  atomic_write_file(bad, "a,b\n1,zzz\n");
  REQUIRE_THROWS(read_dataset_csv(bad));
  REQUIRE_THROWS_AS(read_dataset_csv((dir / "missing.csv").string()),
                    std::invalid_argument);
}

TEST_CASE("matrix and SpdPair JSON round trip") {
  GraphModelSpec spec;
  spec.p = 4;
  spec.edge_prob = 0.5;
  spec.seed = 5;
  auto [graph, model] = random_true_model(spec);
  const json j = spd_pair_to_json(model);
  SpdPair back = spd_pair_from_json(json::parse(j.dump()));
  REQUIRE((back.sigma.array() == model.sigma.array()).all());
  REQUIRE((back.kappa.array() == model.kappa.array()).all());

  const json jg = graph_to_json(graph);
  REQUIRE(graph_from_json(json::parse(jg.dump())) == graph);
}

TEST_CASE("atomic write replaces content and creates directories") {
  const auto dir = temp_dir() / "nested" / "deep";
  const auto path = (dir / "file.txt").string();
  atomic_write_file(path, "one");
  atomic_write_file(path, "two");
  std::ifstream in(path);
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  REQUIRE(content == "two");
  REQUIRE(!std::filesystem::exists(path + ".tmp"));
}

TEST_CASE("g17 formatting survives a parse round trip") {
  for (double v : {1.0 / 3.0, 1e-17, -2.5e300, 0.1 + 0.2}) {
    const std::string s = fmt_g17(v);
    REQUIRE(std::stod(s) == v);
  }
}
