#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "support.hpp"
#include "tactile/errors.hpp"
#include "tactile/labeling.hpp"

using namespace tactile;

namespace {

const Extent kExtent{0, 0, 32, 32};

SurfaceMesh mesh_of(std::vector<std::pair<double, double>> pts) {
  std::vector<MeshNode> nodes;
  std::int64_t id = 1;
  for (auto [x, y] : pts) nodes.push_back({id++, x, y});
  return SurfaceMesh(std::move(nodes), kExtent);
}

}  // namespace

TEST_CASE("bin grid must tile the extent") {
  CHECK_NOTHROW(BinGrid(kExtent, 20, 20));
  CHECK_THROWS_AS(BinGrid(kExtent, 0, 4), InputError);
  CHECK_THROWS_AS(BinGrid(Extent{0, 0, 32, 30}, 4, 4), InputError);
  CHECK(BinGrid(kExtent, 20, 20).bin_side() == doctest::Approx(1.6));
  const auto g = BinGrid::from_json(BinGrid(Extent{1, 2, 10, 20}, 2, 1).to_json());
  CHECK(g.rows() == 2);
  CHECK(g.extent().y0 == 2.0);
}

TEST_CASE("bin assignment rules") {
  const BinGrid g(kExtent, 20, 20);
  const auto mesh = mesh_of({{0.8, 0.8}, {1.6, 0.8}, {0.8, 1.6}, {31.999, 31.999}, {32.0, 32.0}, {0.0, 0.0}, {24.0, 8.8}});
  const auto b = assign_bins(mesh, g);
  CHECK(b[0] == 0);
  CHECK(b[1] == 1);                // interior edge goes to the +x bin
  CHECK(b[2] == 20);               // and the +y bin
  CHECK(b[3] == 19 * 20 + 19);
  CHECK(b[4] == 19 * 20 + 19);     // closed outer edge
  CHECK(b[5] == 0);
  CHECK(b[6] == 5 * 20 + 15);

  CHECK_THROWS_AS(mesh_of({{33.0, 1.0}}), InputError);
}

TEST_CASE("binning examples") {
  const BinGrid g(kExtent, 4, 4);
  const auto mesh = mesh_of({{1, 1}, {2, 2}, {20, 20}});
  NodalForceField one{1, {{1, {0, 0, -1}}}, {}};
  const auto l1 = bin_forces(one, mesh, g);
  CHECK(l1.values.size() == 16);
  CHECK(l1.values[0] == Vec3{0, 0, -1});
  for (std::size_t i = 1; i < 16; ++i) CHECK(l1.values[i] == Vec3{});
  CHECK(total_force(l1) == Vec3{0, 0, -1});

  NodalForceField two{2, {{1, {1, 0, 0}}, {2, {-1, 0, 0}}}, {}};
  CHECK(bin_forces(two, mesh, g).values[0] == Vec3{});

  CHECK(total_force(NodalForceField{}) == Vec3{});

  NodalForceField unknown{3, {{99, {1, 0, 0}}}, {}};
  CHECK_THROWS_AS(bin_forces(unknown, mesh, g), InputError);
}

TEST_CASE("binning conserves the total force") {
  Rng rng(17);
  std::vector<std::pair<double, double>> pts;
  for (int i = 0; i < 500; ++i) pts.emplace_back(rng.uniform(0, 32), rng.uniform(0, 32));
  const auto mesh = mesh_of(pts);
  NodalForceField field{1, {}, {}};
  for (int i = 0; i < 500; ++i) {
    const double s = std::pow(10.0, rng.uniform(-6, 2));
    field.forces.push_back({i + 1, {s * rng.normal(), s * rng.normal(), -s * rng.uniform()}});
  }
  // Brute-force oracle: exact rational-like reference via long double pairwise sums.
  long double ref[3] = {0, 0, 0};
  for (const auto& f : field.forces)
    for (int a = 0; a < 3; ++a) ref[a] += f.force[a];

  for (auto [r, c] : {std::pair<std::size_t, std::size_t>{1, 1}, {4, 4}, {20, 20}, {40, 40}}) {
    const auto lab = bin_forces(field, mesh, BinGrid(kExtent, r, c));
    const Vec3 tb = total_force(lab), tn = total_force(field);
    for (int a = 0; a < 3; ++a) {
      CHECK(std::abs(tb[a] - tn[a]) <= 1e-12 * std::max(1.0, std::abs(tn[a])));
      CHECK(std::abs(tn[a] - static_cast<double>(ref[a])) <= 1e-12 * std::max(1.0, std::abs(tn[a])));
    }
  }

  // Permuting the node order does not change the label beyond rounding.
  auto shuffled = field;
  shuffle(shuffled.forces, rng);
  const BinGrid g(kExtent, 20, 20);
  const auto a = bin_forces(field, mesh, g), b = bin_forces(shuffled, mesh, g);
  for (std::size_t i = 0; i < g.size(); ++i)
    for (int k = 0; k < 3; ++k) CHECK(std::abs(a.values[i][k] - b.values[i][k]) <= 1e-12);
}

TEST_CASE("batch binning matches the serial path") {
  const auto mesh = SurfaceMesh::regular(kExtent, 0.5);
  const BinGrid g(kExtent, 20, 20);
  std::vector<NodalForceField> fields;
  for (int i = 0; i < 12; ++i) {
    fields.push_back(synth_indentation(mesh, i + 1, {4.0 + 2.0 * i, 10.0 + i, 0.2 + 0.15 * i}, ContactModel{}));
  }
  const auto batch = bin_forces_batch(fields, mesh, g);
  REQUIRE(batch.size() == fields.size());
  for (std::size_t i = 0; i < fields.size(); ++i) {
    CHECK(batch[i].indentation_id == fields[i].indentation_id);
    CHECK(batch[i].values == bin_forces(fields[i], mesh, g).values);
  }
}

TEST_CASE("ground truth rmse") {
  const std::vector<ForceTotal> fem{{1, {0.1, 0.2, -1.0}}, {2, {0.0, 0.0, -1.5}}};
  std::vector<FtReading> same{{2, {0.0, 0.0, -1.5}}, {1, {0.1, 0.2, -1.0}}};
  CHECK(ground_truth_rmse(fem, same) == Vec3{});

  std::vector<FtReading> dz{{1, {0.1, 0.2, -1.06}}, {2, {0.0, 0.0, -1.44}}};
  const auto r = ground_truth_rmse(fem, dz);
  CHECK(r.z == doctest::Approx(0.06).epsilon(1e-12));
  CHECK(r.x == 0.0);

  const std::vector<ForceTotal> single{{5, {0, 0, 0}}};
  const std::vector<FtReading> shifted{{5, {0.3, 0.4, 0}}};
  const auto s = ground_truth_rmse(single, shifted);
  CHECK(s.x == doctest::Approx(0.3));
  CHECK(s.y == doctest::Approx(0.4));
  CHECK(s.z == 0.0);

  const std::vector<FtReading> missing{{1, {}}, {7, {}}};
  try {
    (void)ground_truth_rmse(fem, missing);
    FAIL("expected an error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find('7') != std::string::npos);
  }
}

TEST_CASE("synthetic indentation contact model") {
  const auto mesh = SurfaceMesh::regular(kExtent, 0.5);
  const ContactModel model;

  const auto zero = synth_indentation(mesh, 1, {16, 16, 0.0}, model);
  CHECK(total_force(zero) == Vec3{});

  const auto deep = synth_indentation(mesh, 2, {16, 16, 2.0}, model);
  const Vec3 t = total_force(deep);
  CHECK(std::abs(t.z) == doctest::Approx(1.7).epsilon(1e-12));
  CHECK(std::abs(t.x) <= 1e-9 * std::abs(t.z));
  CHECK(std::abs(t.y) <= 1e-9 * std::abs(t.z));

  // |Fz| scales with depth^1.5.
  const auto half = synth_indentation(mesh, 3, {16, 16, 1.0}, model);
  CHECK(std::abs(total_force(half).z) == doctest::Approx(1.7 / std::pow(2.0, 1.5)).epsilon(1e-12));

  // Mirroring the centre across x = 16 mirrors the nodal shear field.
  const auto left = synth_indentation(mesh, 4, {10.3, 12.1, 1.2}, model);
  const auto right = synth_indentation(mesh, 5, {21.7, 12.1, 1.2}, model);
  std::map<std::pair<long, long>, Vec3> mirrored;
  for (const auto& f : right.forces) {
    const auto& n = mesh.nodes()[*mesh.index_of(f.node_id)];
    mirrored[{std::lround(2 * (32.0 - n.x_mm)), std::lround(2 * n.y_mm)}] = f.force;
  }
  CHECK(mirrored.size() == right.forces.size());
  for (const auto& f : left.forces) {
    const auto& n = mesh.nodes()[*mesh.index_of(f.node_id)];
    const auto it = mirrored.find({std::lround(2 * n.x_mm), std::lround(2 * n.y_mm)});
    if (it == mirrored.end()) {
      CHECK(f.force == Vec3{});
      continue;
    }
    CHECK(std::abs(f.force.x + it->second.x) <= 1e-12);
    CHECK(std::abs(f.force.y - it->second.y) <= 1e-12);
    CHECK(std::abs(f.force.z - it->second.z) <= 1e-12);
  }

  CHECK_THROWS_AS(synth_indentation(mesh, 6, {40, 16, 1.0}, model), DomainError);
  CHECK_THROWS_AS(synth_indentation(mesh, 7, {16, 16, -0.1}, model), DomainError);
}

TEST_CASE("csv round trips") {
  const auto dir = testing::scratch_dir("labeling");
  const auto mesh = SurfaceMesh::regular(Extent{0, 0, 4, 4}, 1.0);
  {
    std::ofstream(dir / "mesh.csv") << format_mesh_csv(mesh);
    const auto back = read_mesh_csv(dir / "mesh.csv", Extent{0, 0, 4, 4});
    CHECK(back.size() == 25);
    CHECK(back.nodes()[7].x_mm == mesh.nodes()[7].x_mm);
  }
  std::vector<NodalForceField> fields{{3, {{1, {0.5, 0, -1}}, {25, {0, 0.25, -2}}}, {1, 1, 0.5}},
                                      {1, {{13, {0, 0, -0.125}}}, {2, 2, 1.0}}};
  std::ofstream(dir / "forces.csv") << format_forces_csv(fields);
  std::ofstream(dir / "metadata.csv") << format_metadata_csv(fields);
  const auto back = read_force_fields(dir / "forces.csv", dir / "metadata.csv");
  REQUIRE(back.size() == 2);
  CHECK(back[0].indentation_id == 1);
  CHECK(back[1].forces.size() == 2);
  CHECK(back[1].meta.depth_mm == 0.5);
  CHECK(total_force(back[1]) == Vec3{0.5, 0.25, -3});

  std::ofstream(dir / "bad.csv") << "indentation_id,node_id,fx_n,fy_n,fz_n\n1,2,0,oops,0\n";
  CHECK_THROWS_AS(read_force_fields(dir / "bad.csv", dir / "metadata.csv"), InputError);
}
