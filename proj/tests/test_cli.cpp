#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "divsearch/io.hpp"
#include "test_support.hpp"

using namespace divsearch;
namespace t = divsearch::testing;

namespace {

const std::string kCli = DIVSEARCH_CLI_PATH;
const std::filesystem::path kData = DIVSEARCH_TEST_DATA;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const t::TempDir& dir, const std::string& args) {
  const auto out = dir / "stdout.txt";
  const auto err = dir / "stderr.txt";
  const std::string cmd = "'" + kCli + "' " + args + " > '" + out.string() + "' 2> '" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_text_file(out), read_text_file(err)};
}

std::string fixture_flags() {
  return "--edges '" + (kData / "fixture.edges").string() + "' --attrs '" + (kData / "fixture.attrs").string() + "'";
}

}  // namespace

TEST_CASE("cli: index is deterministic and independent of --threads") {
  t::TempDir dir;
  const auto base = "index " + fixture_flags() + " --R 5000 --seed 3 ";
  REQUIRE(run(dir, base + "--threads 1 --out '" + (dir / "a.idx").string() + "'").code == 0);
  REQUIRE(run(dir, base + "--threads 4 --out '" + (dir / "b.idx").string() + "'").code == 0);
  CHECK(read_text_file(dir / "a.idx") == read_text_file(dir / "b.idx"));
}

TEST_CASE("cli: missing attribute file still indexes, ACR reported as 0") {
  t::TempDir dir;
  const auto idx = (dir / "g.idx").string();
  const auto r = run(dir, "index --edges '" + (kData / "fixture.edges").string() + "' --R 2000 --out '" + idx + "'");
  REQUIRE(r.code == 0);
  CHECK(r.err.find("warning") != std::string::npos);
  REQUIRE(run(dir, "query --index '" + idx + "' --query q --k 3 --algo panther --out '" +
                       (dir / "res.json").string() + "'")
              .code == 0);
  const auto ev = run(dir, "eval --result '" + (dir / "res.json").string() + "' --index '" + idx + "' --format tsv");
  REQUIRE(ev.code == 0);
  std::istringstream rows(ev.out);
  std::string header, row;
  std::getline(rows, header);
  std::getline(rows, row);
  // panther is top-k itself, so Rel = 1; no attributes means ACR = 0.
  CHECK(row.rfind("1\t", 0) == 0);
  std::vector<std::string> cols;
  std::istringstream cs(row);
  for (std::string c; std::getline(cs, c, '\t');) cols.push_back(c);
  REQUIRE(cols.size() == 5);
  CHECK(cols[2] == "0");
  CHECK(ev.err.find("ACR") != std::string::npos);
}

TEST_CASE("cli: grdacd with r = 0 matches gacd node for node") {
  t::TempDir dir;
  const auto idx = (dir / "g.idx").string();
  const auto common = "query --index '" + idx + "' " + fixture_flags() + " --R 4000 --seed 9 --query a --k 4 --lambda 0.4 ";
  const auto a = run(dir, common + "--algo gacd --format tsv");
  const auto b = run(dir, common + "--algo grdacd --r 0 --format tsv");
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  CHECK(a.out == b.out);
  CHECK_FALSE(a.out.empty());
}

TEST_CASE("cli: input errors exit with code 1") {
  t::TempDir dir;
  const auto idx = (dir / "g.idx").string();
  REQUIRE(run(dir, "index " + fixture_flags() + " --R 1000 --out '" + idx + "'").code == 0);
  CHECK(run(dir, "query --index '" + idx + "' --query nobody --k 3 --algo panther").code == 1);
  CHECK(run(dir, "query --index '" + idx + "' --query q --k 3 --algo gacd").code == 1);
  CHECK(run(dir, "query --index '" + idx + "' --query q --k 3 --algo grdacd --lambda 0.5").code == 1);
  CHECK(run(dir, "query --index '" + idx + "' --query q --k 3 --algo magic --lambda 0.5").code == 1);
  CHECK(run(dir, "query --index '" + idx + "' --query q --algo panther").code == 1);
  CHECK(run(dir, "query --index '" + (dir / "none.idx").string() + "' --query q --k 3 --algo panther").code == 1);
  CHECK(run(dir, "index --edges '" + (dir / "missing.edges").string() + "' --out x.idx").code == 1);
  CHECK(run(dir, "index " + fixture_flags() + " --R 10 --epsilon 0.1 --out '" + idx + "'").code == 1);

  std::ofstream(dir / "bad.edges") << "a b\na b c d\n";
  const auto bad = run(dir, "index --edges '" + (dir / "bad.edges").string() + "' --out '" + idx + "'");
  CHECK(bad.code == 1);
  CHECK(bad.err.find(":2:") != std::string::npos);
}

TEST_CASE("cli: bench rejects an empty algorithm set") {
  t::TempDir dir;
  const auto r = run(dir, "bench --sizes 100 --algo , --lambda 0.5");
  CHECK(r.code == 1);
  CHECK(r.err.find("no algorithms selected") != std::string::npos);
}

TEST_CASE("cli: bench emits one row per size, k, algorithm and seed") {
  t::TempDir dir;
  const auto r = run(dir, "bench --sizes 200,400 --k 3,5 --algo gacd,panther --seeds 1,2 --lambda 0.5 --R 2000 "
                          "--attrs 20 --attrs-per-node 2 --candidates 50 --reps 1");
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("n\tedges\tk\talgo\tseed\t", 0) == 0);
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 2 * 2 * 2 * 2);
}

TEST_CASE("cli: query piped into eval, with index or candidate file") {
  t::TempDir dir;
  const auto idx = (dir / "g.idx").string();
  REQUIRE(run(dir, "index " + fixture_flags() + " --R 6000 --seed 5 --out '" + idx + "'").code == 0);
  const auto res = (dir / "res.json").string();
  const auto cand = (dir / "cand.tsv").string();
  REQUIRE(run(dir, "query --index '" + idx + "' --query q --k 3 --algo grdacd --lambda 0.5 --r 0.3 --out '" + res +
                       "' --cand-out '" + cand + "'")
              .code == 0);
  const auto via_index = run(dir, "eval --result '" + res + "' --index '" + idx + "'");
  const auto via_cand = run(dir, "eval --result '" + res + "' --cand-file '" + cand + "' " + fixture_flags());
  REQUIRE(via_index.code == 0);
  REQUIRE(via_cand.code == 0);
  CHECK(via_index.out == via_cand.out);
  CHECK(via_index.out.find("\"min_diss\"") != std::string::npos);

  // The stored result reproduces the in-memory one.
  const auto bundle = load_index(idx);
  const auto parsed = result_from_json(read_text_file(res), bundle.graph);
  CHECK(result_to_json(parsed, bundle.graph) == read_text_file(res));

  // A candidate file for another query is rejected.
  const auto other = (dir / "other.tsv").string();
  REQUIRE(run(dir, "query --index '" + idx + "' --query a --k 3 --algo panther --cand-out '" + other + "'").code == 0);
  CHECK(run(dir, "eval --result '" + res + "' --cand-file '" + other + "' " + fixture_flags()).code == 1);
}

TEST_CASE("cli: gacd on the 10-candidate fixture matches the golden file") {
  t::TempDir dir;
  const auto idx = (dir / "fx.idx").string();
  REQUIRE(run(dir, "index " + fixture_flags() + " --R 20000 --T 5 --seed 7 --out '" + idx + "'").code == 0);
  const auto q = run(dir, "query --index '" + idx + "' --query q --k 3 --algo gacd --lambda 0.5 --candidates 10 "
                          "--cand-out '" + (dir / "cand.tsv").string() + "'");
  REQUIRE(q.code == 0);
  CHECK(q.out == read_text_file(kData / "golden_gacd.json"));
  CHECK(read_text_file(dir / "cand.tsv") == read_text_file(kData / "golden_candidates.tsv"));

  // The golden itself is checked against exhaustive search over all
  // C(10, 3) subsets of the frozen candidate set.
  const auto g = load_graph(kData / "fixture.edges", kData / "fixture.attrs");
  const auto cand = CandidateSet::read_tsv(kData / "golden_candidates.tsv");
  REQUIRE(cand.size() == 10);
  const auto golden = result_from_json(read_text_file(kData / "golden_gacd.json"), g);
  CoverageInstance inst;
  inst.lambda = 0.5;
  inst.universe_size = g.attribute_universe_size();
  for (const auto& c : cand.members()) {
    inst.nodes.push_back(c.node);
    inst.relevance.push_back(c.relevance);
    inst.sets.emplace_back(g.attributes(c.node).begin(), g.attributes(c.node).end());
  }
  std::vector<std::size_t> chosen;
  for (NodeId u : golden.nodes) chosen.push_back(*cand.position_of(u));
  CHECK(t::oracle_value(inst, chosen) == doctest::Approx(golden.objective).epsilon(1e-12));
  CHECK(golden.objective >= (1.0 - std::exp(-1.0)) * t::brute_force_opt(inst, 3) - 1e-12);
}

TEST_CASE("cli: generate is deterministic") {
  t::TempDir dir;
  const auto a = (dir / "a").string();
  const auto b = (dir / "b").string();
  REQUIRE(run(dir, "generate --n 300 --avg-degree 6 --attrs 15 --attrs-per-node 3 --seed 4 --out '" + a + "'").code ==
          0);
  REQUIRE(run(dir, "generate --n 300 --avg-degree 6 --attrs 15 --attrs-per-node 3 --seed 4 --out '" + b + "'").code ==
          0);
  CHECK(read_text_file(a + ".edges") == read_text_file(b + ".edges"));
  CHECK(read_text_file(a + ".attrs") == read_text_file(b + ".attrs"));
  CHECK(run(dir, "generate --n 10 --out '" + a + "'").code == 1);
}
