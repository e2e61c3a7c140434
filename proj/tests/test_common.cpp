#include <doctest.h>

#include <fstream>
#include <set>

#include "support.hpp"
#include "tactile/csv.hpp"
#include "tactile/errors.hpp"
#include "tactile/io.hpp"
#include "tactile/rng.hpp"

using namespace tactile;

TEST_CASE("rng streams are reproducible and labels separate them") {
  Rng a(42), b(42), c(derive_seed(42, "other"));
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  CHECK(derive_seed(42, "x") != derive_seed(42, "y"));
  CHECK(derive_seed(42, "x") == derive_seed(42, "x"));
  CHECK(Rng(42).next_u64() != c.next_u64());
}

TEST_CASE("rng distributions stay in range") {
  Rng r(7);
  double sum = 0.0, sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(r.below(10) < 10u);
    const double lu = r.log_uniform(0.1, 100.0);
    CHECK(lu >= 0.1);
    CHECK(lu <= 100.0);
    const double z = r.normal();
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.03);
  CHECK(std::abs(sq / n - 1.0) < 0.05);
}

TEST_CASE("shuffle is a seeded permutation") {
  std::vector<int> v(50);
  for (int i = 0; i < 50; ++i) v[i] = i;
  auto w = v;
  Rng r1(3), r2(3);
  shuffle(v, r1);
  shuffle(w, r2);
  CHECK(v == w);
  CHECK(std::set<int>(v.begin(), v.end()).size() == 50);
}

TEST_CASE("fnv1a matches the published test vectors") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("csv parsing with diagnostics") {
  const auto t = csv::Table::parse("a,b\n1,2.5\n\n-3,4e2\n", "mem.csv");
  CHECK(t.rows() == 2);
  CHECK(t.number(0, 1) == 2.5);
  CHECK(t.integer(1, 0) == -3);
  CHECK(t.number(1, 1) == 400.0);
  CHECK(t.column("b") == 1);
  CHECK_NOTHROW(t.require_header({"a", "b"}));
  CHECK_THROWS_AS(t.require_header({"a", "c"}), InputError);

  const auto bad = csv::Table::parse("a,b\n1,x\n", "bad.csv");
  try {
    (void)bad.number(0, 1);
    FAIL("expected an error");
  } catch (const InputError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("bad.csv:2:2") != std::string::npos);
  }
  CHECK_THROWS_AS(csv::Table::parse("a,b\n1,2,3\n"), InputError);
  CHECK_THROWS_AS(csv::Table::parse(""), InputError);
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 123456789.123}) {
    CHECK(std::stod(csv::format_exact(v)) == v);
  }
  CHECK(csv::format_sig(1.0 / 3.0, 9) == "0.333333333");
}

TEST_CASE("atomic writes create directories and replace content") {
  const auto dir = testing::scratch_dir("io");
  const auto path = dir / "nested" / "file.txt";
  io::write_atomic(path, "first");
  io::write_atomic(path, "second");
  CHECK(io::read_file(path) == "second");
  for (const auto& e : std::filesystem::directory_iterator(dir / "nested")) {
    CHECK(e.path().filename() == "file.txt");
  }
  CHECK_THROWS_AS(io::read_file(dir / "missing"), IoError);
}
