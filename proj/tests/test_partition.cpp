#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <random>

#include "hbw/partition.hpp"
#include "oracles.hpp"

using hbw::MatrixXd;

namespace {

MatrixXd distinct(Eigen::Index r, Eigen::Index c) {
  MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<double>(i);
  return m;
}

}  // namespace

TEST_CASE("block counts") {
  CHECK(hbw::partition_blocks(MatrixXd::Zero(512, 512), 8).size() == 4096);
  const auto single = hbw::partition_blocks(distinct(8, 8), 8);
  REQUIRE(single.size() == 1);
  CHECK(single.blocks[0] == distinct(8, 8));
}

TEST_CASE("blocks enumerate row-major over the grid") {
  const auto p = hbw::partition_blocks(distinct(16, 24), 8);
  REQUIRE(p.size() == 6);
  CHECK(p.grid_rows == 2);
  CHECK(p.grid_cols == 3);
  CHECK(p.origins[1] == hbw::BlockOrigin{0, 8});
  CHECK(p.origins[3] == hbw::BlockOrigin{8, 0});
  CHECK(p.blocks[4] == distinct(16, 24).block(8, 8, 8, 8));
}

TEST_CASE("assemble inverts partition") {
  const MatrixXd m = distinct(16, 16);
  CHECK(hbw::assemble_blocks(hbw::partition_blocks(m, 4)) == m);
  CHECK(hbw::assemble_blocks(hbw::partition_blocks(MatrixXd::Zero(8, 16), 4)) == MatrixXd::Zero(8, 16));
}

TEST_CASE("modifying one block is local") {
  const MatrixXd m = distinct(16, 16);
  auto p = hbw::partition_blocks(m, 4);
  p.blocks[5].setConstant(-1.0);
  const MatrixXd out = hbw::assemble_blocks(p);
  const MatrixXd diff = (out - m).cwiseAbs();
  const auto o = p.origins[5];
  CHECK(diff.block(o.row, o.col, 4, 4).minCoeff() > 0.0);
  MatrixXd outside = diff;
  outside.block(o.row, o.col, 4, 4).setZero();
  CHECK(outside.maxCoeff() == 0.0);
}

TEST_CASE("indivisible dimensions are rejected") {
  CHECK_THROWS_AS(hbw::partition_blocks(MatrixXd::Zero(12, 10), 4), hbw::Error);
}

TEST_CASE("permutation round-trips and is deterministic") {
  const auto p = hbw::partition_blocks(distinct(32, 32), 4);
  for (std::uint64_t seed : {0ull, 1ull, 42ull, 0xdeadbeefull}) {
    const auto [perm_p, perm] = hbw::permute_blocks(p, seed);
    const auto back = hbw::unpermute_blocks(perm_p, perm);
    CHECK(back.blocks == p.blocks);
    CHECK(back.origins == p.origins);
    CHECK(hbw::assemble_blocks(perm_p) == distinct(32, 32));

    const auto [again, perm2] = hbw::permute_blocks(p, seed);
    CHECK(perm2.mapping == perm.mapping);

    const auto inv = hbw::invert(hbw::invert(perm));
    CHECK(inv.mapping == perm.mapping);
  }
}

TEST_CASE("identity permutation leaves the partition unchanged") {
  const auto p = hbw::partition_blocks(distinct(8, 8), 4);
  hbw::BlockPermutation id{0, {0, 1, 2, 3}};
  const auto same = hbw::unpermute_blocks(p, id);
  CHECK(same.blocks == p.blocks);
}

TEST_CASE("Q=4096 permutation is a bijection") {
  const auto p = hbw::partition_blocks(MatrixXd::Zero(512, 512), 8);
  const auto [_, perm] = hbw::permute_blocks(p, 12345);
  auto sorted = perm.mapping;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> expected(4096);
  std::iota(expected.begin(), expected.end(), std::size_t{0});
  CHECK(sorted == expected);
  CHECK(perm.mapping != expected);
}

TEST_CASE("permutations are uniform on Q=3") {
  // Chi-squared over the 6 permutations of 3 blocks; 5 dof, p=0.001 critical value 20.5.
  const auto p = hbw::partition_blocks(distinct(4, 12), 4);
  std::map<std::vector<std::size_t>, int> counts;
  const int trials = 6000;
  for (int s = 0; s < trials; ++s) ++counts[hbw::permute_blocks(p, static_cast<std::uint64_t>(s)).second.mapping];
  REQUIRE(counts.size() == 6);
  double chi2 = 0;
  for (const auto& [_, c] : counts) chi2 += (c - 1000.0) * (c - 1000.0) / 1000.0;
  CHECK(chi2 < 20.5);
}

TEST_CASE("unpermute rejects a mismatched permutation") {
  const auto p = hbw::partition_blocks(distinct(8, 8), 4);
  const auto other = hbw::permute_blocks(hbw::partition_blocks(distinct(8, 16), 4), 1).second;
  CHECK_THROWS_AS(hbw::unpermute_blocks(p, other), hbw::Error);
}

TEST_CASE("segments") {
  const auto p12 = hbw::partition_blocks(distinct(12, 16), 4);  // Q = 12
  REQUIRE(p12.size() == 12);
  const auto singles = hbw::segment_blocks(p12, 12);
  CHECK(singles.size() == 12);
  for (const auto& s : singles) CHECK(s.size() == 1);

  const auto whole = hbw::segment_blocks(p12, 1);
  REQUIRE(whole.size() == 1);
  CHECK(whole[0].blocks == p12.blocks);

  const auto p8 = hbw::partition_blocks(distinct(8, 16), 4);  // Q = 8
  REQUIRE(p8.size() == 8);
  const auto halves = hbw::segment_blocks(p8, 2);
  REQUIRE(halves.size() == 2);
  CHECK(halves[0].size() == 4);
  CHECK(halves[1].size() == 4);
  const auto cat = hbw::concatenate_segments(halves);
  CHECK(cat.blocks == p8.blocks);
  CHECK(cat.origins == p8.origins);

  CHECK_THROWS_AS(hbw::segment_blocks(p12, 5), hbw::Error);
  CHECK_THROWS_AS(hbw::segment_blocks(p12, 0), hbw::Error);
}
