#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "potrec/config.hpp"
#include "potrec/error.hpp"
#include "potrec/experiment.hpp"

using namespace potrec;

namespace {
std::string message_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Config);
    return e.what();
  }
  FAIL("expected a config error");
  return {};
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}
}  // namespace

TEST_SUITE("config") {
  TEST_CASE("parse sections, values and comments") {
    const Config c = Config::parse(
        "# header\n"
        "[grid]\n"
        "  n = 3   ; trailing\n"
        "L=2.5\n"
        "\n"
        "[schedule]\n"
        "lambdas = 8, 16,32 # more\n"
        "[flags]\n"
        "on = yes\n"
        "off = false\n"
        "p = 1, -2\n");
    CHECK(c.get_int("grid", "n") == 3);
    CHECK(c.get_double("grid", "L") == 2.5);
    CHECK(c.get_list("schedule", "lambdas") == std::vector<double>{8, 16, 32});
    CHECK(c.get_bool("flags", "on", false));
    CHECK_FALSE(c.get_bool("flags", "off", true));
    CHECK(c.get_bool("flags", "absent", true));
    const Point p = c.get_point("flags", "p", {9, 9, 9});
    CHECK(p == Point{1, -2, 0});
    CHECK(c.get_double("grid", "missing", 4.0) == 4.0);
    CHECK(c.line_of("grid", "L") == 4);
    CHECK(c.line_of("grid", "nope") == 0);
    CHECK(c.sections() == std::vector<std::string>{"flags", "grid", "schedule"});
    CHECK(c.has_section("schedule"));
    CHECK_FALSE(c.has("schedule", "n"));
  }

  TEST_CASE("errors carry the source and line") {
    CHECK(contains(message_of([] { Config::parse("x = 1\n", "a.ini"); }), "a.ini:1"));
    CHECK(contains(message_of([] { Config::parse("[s]\nk = 1\nk = 2\n", "b.ini"); }), "b.ini:3"));
    CHECK(contains(message_of([] { Config::parse("[s]\njunk\n", "c.ini"); }), "c.ini:2"));
    CHECK(contains(message_of([] { Config::parse("[s\n", "d.ini"); }), "d.ini:1"));
    CHECK(contains(message_of([] { Config::parse("[s]\nbad key = 1\n", "e.ini"); }), "e.ini:2"));
    const Config c = Config::parse("[s]\n\nx = abc\ny = 1.5\n", "f.ini");
    CHECK(contains(message_of([&] { c.get_double("s", "x"); }), "f.ini:3"));
    CHECK(contains(message_of([&] { c.get_int("s", "y"); }), "f.ini:4"));
    CHECK(contains(message_of([&] { c.get_bool("s", "x", false); }), "f.ini:3"));
    message_of([&] { c.get_string("s", "missing"); });
    message_of([] { Config::load("/nonexistent/potrec.ini"); });
  }

  TEST_CASE("FNV-1a 64 reference vectors") {
    CHECK(hex(fnv1a64("")) == "cbf29ce484222325");
    CHECK(hex(fnv1a64("a")) == "af63dc4c8601ec8c");
    CHECK(hex(fnv1a64("foobar")) == "85944171f73967e8");
  }

  TEST_CASE("canonical form and hash ignore layout and comments") {
    const Config a = Config::parse("[b]\ny = 2\nx = 1\n[a]\nk = v\n");
    const Config b = Config::parse("# comment\n[a]\n   k=v   ; note\n\n[b]\nx=1\ny =  2\n");
    CHECK(a.canonical() == "[a]\nk=v\n[b]\nx=1\ny=2\n");
    CHECK(a.canonical() == b.canonical());
    CHECK(a.hash() == b.hash());
    CHECK(a.hash() == hex(fnv1a64(a.canonical())));
    const Config c = Config::parse("[a]\nk = w\n[b]\nx = 1\ny = 2\n");
    CHECK(a.hash() != c.hash());
  }

  TEST_CASE("random configurations survive a canonical round trip and any reordering") {
    std::mt19937_64 rng(61);
    std::uniform_int_distribution<int> small(1, 4), digit(0, 999);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<std::pair<std::string, std::vector<std::string>>> sections;
      const int ns = small(rng);
      for (int s = 0; s < ns; ++s) {
        std::vector<std::string> lines;
        const int nk = small(rng);
        for (int k = 0; k < nk; ++k) lines.push_back("k" + std::to_string(k) + " = " + std::to_string(digit(rng)));
        sections.push_back({"s" + std::to_string(s), lines});
      }
      auto render = [&](bool shuffle) {
        auto copy = sections;
        if (shuffle) {
          std::shuffle(copy.begin(), copy.end(), rng);
          for (auto& sec : copy) std::shuffle(sec.second.begin(), sec.second.end(), rng);
        }
        std::string text;
        for (const auto& [name, lines] : copy) {
          text += (shuffle ? "\n  [" : "[") + name + "]\n";
          for (const auto& l : lines) text += (shuffle ? "   " + l + "  ; c\n" : l + "\n");
        }
        return text;
      };
      const Config a = Config::parse(render(false));
      const Config b = Config::parse(render(true));
      CHECK(a.hash() == b.hash());
      const Config back = Config::parse(a.canonical());
      CHECK(back.canonical() == a.canonical());
    }
  }

  TEST_CASE("set overrides and changes the hash") {
    Config c = Config::parse("[grid]\nN = 64\n");
    const std::string before = c.hash();
    c.set("grid", "N", "128");
    CHECK(c.get_int("grid", "N") == 128);
    CHECK(c.hash() != before);
    c.set("schedule", "lambdas", "4, 8");
    CHECK(c.get_list("schedule", "lambdas").size() == 2);
    CHECK_THROWS_AS(c.set("grid", "bad key", "1"), Error);
  }

  TEST_CASE("experiment defaults and the shipped configuration") {
    const ExperimentConfig e = load_experiment(Config::parse("[grid]\nn = 2\n"));
    CHECK(e.grid.N == 0);
    CHECK(e.lambdas == std::vector<double>{8, 16, 32, 64});
    CHECK(e.v1.kind == PotentialKind::Zero);
    CHECK(e.mode == PairingMode::Full);
    CHECK(e.reconstruction_mode == PairingMode::Leading);
    CHECK(e.scatter.pv.extrapolate);
    CHECK(grid_for(e, 16.0).points() == 128);
    CHECK(grid_for(e, 2.0).points() == 64);

    const ExperimentConfig d = load_experiment_file(std::string(POTREC_SOURCE_DIR) + "/configs/default.ini");
    CHECK(d.v1.kind == PotentialKind::Gaussian);
    CHECK(d.v2.center[0] == 0.15);
    CHECK(d.kappas.size() == 6);
    CHECK(d.lattice.count == 17);
    CHECK(d.hash.size() == 16);
    CHECK(d.propagation.dt == 1e-3);
  }

  TEST_CASE("experiment validation names the offending key") {
    CHECK(contains(message_of([] { load_experiment(Config::parse("[grid]\nfoo = 1\n", "x.ini")); }), "x.ini:2: [grid] foo"));
    message_of([] { load_experiment(Config::parse("[nonsense]\n")); });
    message_of([] { load_experiment(Config::parse("[grid]\nn = 4\n")); });
    message_of([] { load_experiment(Config::parse("[grid]\nN = 8\n")); });
    message_of([] { load_experiment(Config::parse("[grid]\nN = 15\n")); });
    message_of([] { load_experiment(Config::parse("[schedule]\nlambdas = 16, 8\n")); });
    message_of([] { load_experiment(Config::parse("[schedule]\nlambdas = 0, 8\n")); });
    message_of([] { load_experiment(Config::parse("[potential.v1]\npreset = cube\n")); });
    message_of([] { load_experiment(Config::parse("[potential.v1]\npreset = file\npath = /no/such.ssfld\n")); });
    message_of([] { load_experiment(Config::parse("[density]\neps = 2\n")); });
    message_of([] { load_experiment(Config::parse("[resolvent]\neta_rule = magic\n")); });
    message_of([] { load_experiment(Config::parse("[scatter]\nwindow = 1.5\n")); });
    message_of([] { load_experiment(Config::parse("[recover]\nkappa_count = 4\n")); });
    message_of([] { load_experiment(Config::parse("[recover]\nkappas = 1, 2, 3\n")); });
    message_of([] { load_experiment(Config::parse("[recover]\nmode = sideways\n")); });
    message_of([] { load_experiment(Config::parse("[propagate]\ndt = -1\n")); });
    message_of([] { load_experiment(Config::parse("[propagate]\ninitial = /no/such.ssfld\n")); });
    message_of([] { load_experiment(Config::parse("[run]\nseed = 1.5\n")); });
  }

  TEST_CASE("file potentials load from disk") {
    const auto dir = std::filesystem::temp_directory_path() / "potrec_config_test";
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "v.ssfld").string();
    write_field(path, ScalarField(make_grid(2, 1.0, 16)));
    const ExperimentConfig e = load_experiment(Config::parse("[potential.v1]\npreset = file\npath = " + path + "\n"));
    CHECK(e.v1.kind == PotentialKind::File);
    CHECK(e.v1.path == path);
  }
}
