#include <doctest.h>

#include <bit>
#include <cstring>
#include <random>
#include <sstream>

#include "cygnet/checkpoint.hpp"
#include "cygnet/error.hpp"
#include "cygnet/optimizer.hpp"
#include "cygnet/run_config.hpp"

using namespace cygnet;

namespace {

template <class T>
T read_le(const std::string& bytes, std::size_t offset) {
  static_assert(std::endian::native == std::endian::little, "test assumes a little-endian host");
  T v;
  std::memcpy(&v, bytes.data() + offset, sizeof v);
  return v;
}

}  // namespace

TEST_CASE("checkpoint byte layout") {
  Rng rng(5);
  auto p = init_params<float>(3, 4, 6, 2, rng);
  p.copy_bias(1, 0) = 0.25f;
  p.gen_bias(2, 0) = -1.5f;
  p.alpha = 0.7f;
  std::ostringstream out;
  write_checkpoint(out, p);
  const std::string bytes = out.str();

  const std::size_t floats = 3 * 2 + 4 * 2 + 2 + 3 * 6 + 3 + 3 * 6 + 3;
  REQUIRE(bytes.size() == 4 + 4 * 4 + 2 * 4 + floats * 4);
  CHECK(bytes.substr(0, 4) == "CYG1");
  CHECK(read_le<std::int32_t>(bytes, 4) == 3);
  CHECK(read_le<std::int32_t>(bytes, 8) == 4);
  CHECK(read_le<std::int32_t>(bytes, 12) == 6);
  CHECK(read_le<std::int32_t>(bytes, 16) == 2);
  CHECK(read_le<float>(bytes, 20) == 100.0f);
  CHECK(read_le<float>(bytes, 24) == 0.7f);

  // Walk the arrays in their documented order.
  std::size_t off = 28;
  auto expect = [&](const Matrix<float>& m) {
    for (float v : m.flat()) {
      CHECK(read_le<float>(bytes, off) == v);
      off += 4;
    }
  };
  expect(p.entity_emb);
  expect(p.relation_emb);
  expect(p.time_unit);
  expect(p.copy_weight);
  expect(p.copy_bias);
  expect(p.gen_weight);
  expect(p.gen_bias);
  CHECK(off == bytes.size());
}

TEST_CASE("checkpoint round trip with and without provenance") {
  Rng rng(8);
  auto p = init_params<float>(5, 2, 3, 4, rng);
  p.mask_magnitude = 50.0f;

  std::stringstream plain;
  write_checkpoint(plain, p);
  auto a = read_checkpoint(plain);
  CHECK(a.params == p);
  CHECK(a.provenance.empty());

  RunConfig cfg("train");
  cfg.set("dim", "4", Provenance::Flag);
  std::stringstream tagged;
  write_checkpoint(tagged, p, cfg.render());
  auto b = read_checkpoint(tagged);
  CHECK(b.params == p);
  CHECK(b.provenance == cfg.render());
  CHECK(b.provenance.find(kToolVersion) != std::string::npos);
}

TEST_CASE("malformed checkpoints are rejected") {
  std::istringstream empty("");
  CHECK_THROWS_AS(read_checkpoint(empty), FormatError);
  std::istringstream wrong("XXXX0000");
  CHECK_THROWS_AS(read_checkpoint(wrong), FormatError);

  Rng rng(1);
  std::ostringstream out;
  write_checkpoint(out, init_params<float>(2, 2, 2, 2, rng));
  std::istringstream cut(out.str().substr(0, out.str().size() - 3));
  CHECK_THROWS_AS(read_checkpoint(cut), FormatError);
}

TEST_CASE("config text parsing") {
  auto m = parse_config_text("# comment\n\ndim = 32\nalpha=0.5  # flag\ndim = 16\n");
  CHECK(m.at("dim") == "16");
  CHECK(m.at("alpha") == "0.5");
  CHECK_THROWS_AS(parse_config_text("dim 32\n"), FormatError);
  CHECK_THROWS_AS(parse_config_text(" = 3\n"), FormatError);

  RunConfig cfg("eval");
  cfg.set("alpha", "0.8", Provenance::Default);
  cfg.set("alpha", "0.6", Provenance::ConfigFile);
  cfg.set("split", "test", Provenance::Flag);
  const auto text = cfg.render("# ");
  CHECK(text.find("# alpha = 0.6  # config-file\n") != std::string::npos);
  CHECK(text.find("# split = test  # flag\n") != std::string::npos);
  // Rendered output (without the CSV prefix) parses back to the same values.
  auto back = parse_config_text(cfg.render());
  CHECK(back.at("alpha") == "0.6");
  CHECK(back.at("command") == "eval");
}
