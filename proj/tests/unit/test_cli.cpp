#include <doctest.h>

#include <sstream>

#include "ecsim/cli/report.hpp"
#include "ecsim/cli/svg.hpp"
#include "ecsim/cli/sweep.hpp"

using namespace ecsim::cli;

namespace {

SweepConfig small_config() {
  SweepConfig c;
  c.protocols = parse_protocols("distillation,nec,cec,catalyst-reuse");
  c.axis = Axis::p_d;
  c.range = Range::parse("0:0.04:0.02");
  c.base.a = 0.15;
  return c;
}

std::string csv_of(const SweepConfig& c) {
  std::ostringstream out;
  write_csv(out, run_sweep(c), c.axis, c.convention);
  return out.str();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("argument parsing") {
    CHECK(parse_protocols("cec,nec,cec") == std::vector<Protocol>{Protocol::nec, Protocol::cec});
    CHECK_THROWS_AS(parse_protocols("nec,bogus"), UsageError);
    CHECK(parse_axis("p_g") == Axis::p_g);
    CHECK_THROWS_AS(parse_axis("q"), UsageError);
    CHECK(Range::parse("0:0.1:0.05").values() == std::vector<double>{0.0, 0.05, 0.1});
    CHECK(Range::parse("0.3:0.3:0.1").values().size() == 1);
    CHECK_THROWS_AS(Range::parse("0:1"), UsageError);
    CHECK_THROWS_AS(Range::parse("1:0:0.1"), UsageError);
    CHECK_THROWS_AS(Range::parse("0:1:0"), UsageError);
    CHECK_THROWS_AS(Range::parse("0:x:0.1"), UsageError);

    SweepConfig c = small_config();
    c.range = Range::parse("0:1.5:0.5");
    CHECK_THROWS_AS(c.validate(), UsageError);
    c = small_config();
    c.protocols.clear();
    CHECK_THROWS_AS(c.validate(), UsageError);
  }

  TEST_CASE("retention convention maps a and p_d only") {
    SweepConfig c = small_config();
    c.convention = AxisConvention::retention;
    c.axis = Axis::a;
    const auto p = c.at(0.9);
    CHECK(p.a == doctest::Approx(0.1));
    c.axis = Axis::p_g;
    CHECK(c.at(0.01).p_g == doctest::Approx(0.01));
  }

  TEST_CASE("sweep rows are ordered and deterministic") {
    SweepConfig c = small_config();
    c.threads = 1;
    const auto rows = run_sweep(c);
    REQUIRE(rows.size() == 12);
    const Protocol order[] = {Protocol::nec, Protocol::cec, Protocol::catalyst_reuse, Protocol::distillation};
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(rows[i].protocol == order[i % 4]);
      CHECK(rows[i].axis_value == doctest::Approx(0.02 * static_cast<double>(i / 4)));
      CHECK(rows[i].infidelity == doctest::Approx(1.0 - rows[i].output_fidelity));
    }
    CHECK(!rows[0].catalyst_fidelity_before.has_value());
    CHECK(rows[1].catalyst_fidelity_after.has_value());
    CHECK(rows[3].mcx_total == 2);

    const std::string one = csv_of(c);
    c.threads = 4;
    CHECK(csv_of(c) == one);
    CHECK(one.rfind("# ecbench-sweep-v1 axis=p_d convention=error\n", 0) == 0);
    CHECK(one.find("protocol,a,p_d,p_g,g,success_probability,output_fidelity,infidelity,"
                   "catalyst_fidelity_before,catalyst_fidelity_after,mcx_total\n") != std::string::npos);
  }

  TEST_CASE("CSV round trip and report") {
    SweepConfig c = small_config();
    c.protocols = parse_protocols("nec,distillation");
    const auto rows = run_sweep(c);
    std::ostringstream out;
    write_csv(out, rows, c.axis, c.convention);
    std::istringstream in(out.str());
    const auto table = read_csv(in);
    REQUIRE(table.rows.size() == rows.size());
    REQUIRE(table.axis.has_value());
    CHECK(*table.axis == Axis::p_d);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(table.rows[i].protocol == rows[i].protocol);
      CHECK(table.rows[i].success_probability == doctest::Approx(rows[i].success_probability).epsilon(1e-11));
      CHECK(table.rows[i].mcx_total == rows[i].mcx_total);
    }

    const auto rep = summarize(table);
    CHECK(rep.axis == Axis::p_d);
    REQUIRE(rep.protocols.size() == 2);
    CHECK(rep.protocols[0].points == 3);
    const std::string text = render(rep, table);
    CHECK(text.find("nec") != std::string::npos);
    CHECK(text.find("distillation") != std::string::npos);
  }

  TEST_CASE("report finds crossovers") {
    CsvTable t;
    t.axis = Axis::p_g;
    auto row = [](Protocol p, double x, double inf) {
      SweepRow r;
      r.protocol = p;
      r.axis_value = r.p_g = x;
      r.infidelity = inf;
      r.output_fidelity = 1 - inf;
      return r;
    };
    t.rows = {row(Protocol::nec, 0.0, 0.05), row(Protocol::distillation, 0.0, 0.1),
              row(Protocol::nec, 0.01, 0.2), row(Protocol::distillation, 0.01, 0.15)};
    const auto rep = summarize(t);
    REQUIRE(rep.crossovers.size() == 1);
    CHECK(rep.crossovers[0].axis_value == 0.01);
    CHECK(rep.crossovers[0].before == Protocol::nec);
    CHECK(rep.crossovers[0].after == Protocol::distillation);
    t.axis.reset();
    CHECK(summarize(t).axis == Axis::p_g);
  }

  TEST_CASE("malformed CSV is rejected") {
    const std::string header =
        "protocol,a,p_d,p_g,g,success_probability,output_fidelity,infidelity,"
        "catalyst_fidelity_before,catalyst_fidelity_after,mcx_total\n";
    for (const std::string& bad : {std::string("garbage\n"), header + "nec,0.1,0,0,1,0.5,0.9,0.1,,\n",
                                  header + "xyz,0.1,0,0,1,0.5,0.9,0.1,,,4\n",
                                  header + "nec,0.1,0,0,1,abc,0.9,0.1,,,4\n"}) {
      std::istringstream in(bad);
      CHECK_THROWS_AS(read_csv(in), UsageError);
    }
    std::istringstream ok(header + "nec,0.1,0,0,all,0.5,0.9,0.1,,,4\n");
    CHECK(read_csv(ok).rows.size() == 1);
  }

  TEST_CASE("SVG and JSON documents") {
    SweepConfig c = small_config();
    c.protocols = parse_protocols("nec,cec");
    const auto rows = run_sweep(c);
    const std::string svg = render_svg(rows, c.axis, c.convention);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("<polyline") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    const auto j = to_json(c, rows);
    CHECK(j["rows"].size() == rows.size());
  }
}
