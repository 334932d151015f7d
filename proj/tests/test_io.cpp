#include <filesystem>
#include <fstream>

#include "fraclab/commands.hpp"
#include "fraclab/report.hpp"
#include "fraclab/scene_io.hpp"
#include "support.hpp"

using namespace fraclab;
using namespace fraclab::test;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string error_message(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

CommandOptions command(const std::string& name) {
  CommandOptions o;
  o.command = name;
  return o;
}

}  // namespace

TEST_SUITE("scene io") {

TEST_CASE("fixtures expand to the paper's sets") {
  const Scene two = fixture_scene("two-balls-r3");
  CHECK(two.dimension == 3);
  CHECK(contains(two.set, pt({0, 4, 0.9})));
  CHECK(contains(two.set, pt({0.9, 0, 0})));
  CHECK_FALSE(contains(two.set, pt({0, 2, 0})));
  CHECK(two.set.describe() == two_balls().describe());
  const Scene sh = fixture_scene("annulus-shell");
  CHECK(sh.set.describe() == shell().describe());
  for (const auto& name : fixture_names()) CHECK_NOTHROW(fixture_scene(name).validate());
  CHECK(error_kind([] { fixture_scene("nope"); }) == ErrorKind::ValidationError);
}

TEST_CASE("scene documents") {
  const std::string text = R"({
    "dimension": 2,
    "set": {"union": [{"ball": {"center": [0, 0], "radius": 1}}, {"box": {"lo": [2, 2], "hi": [3, 3]}}]},
    "field": {"type": "distance"},
    "params": {"s": 0.6, "k": 1},
    "optimizer": {"restarts": 3, "seed": 9}
  })";
  const Scene sc = parse_scene_text(text);
  CHECK(sc.dimension == 2);
  CHECK(sc.params.s == 0.6);
  CHECK(sc.optimizer.restarts == 3);
  CHECK(sc.optimizer.seed == 9);
  CHECK(sc.make_field()->value(pt({0, 0})) == doctest::Approx(1.0));
  // serialization is a fixed point
  const std::string once = scene_to_json(sc);
  CHECK(scene_to_json(parse_scene_text(once)) == once);
  const Scene from_fixture = parse_scene_text(R"({"fixture": "two-balls-r3", "params": {"s": 0.7, "k": 2}})");
  CHECK(from_fixture.params.s == 0.7);
  CHECK(from_fixture.set.describe() == two_balls().describe());
}

TEST_CASE("scene errors name the place") {
  CHECK(error_kind([] { parse_scene_text(R"({"fixture": "two-balls-r3", "params": {"s": 1.5}})"); }) ==
        ErrorKind::ValidationError);
  const std::string bad_s = error_message([] { parse_scene_text(R"({"fixture": "two-balls-r3", "params": {"s": 1.5}})"); });
  CHECK(bad_s.find("/params/s") != std::string::npos);
  const std::string syntax = error_message([] { parse_scene_text("{\n  \"dimension\": 3,\n  oops\n}"); });
  CHECK(syntax.find("ParseError") == 0);
  CHECK(syntax.find("line 3") != std::string::npos);
  const std::string radius = error_message([] {
    parse_scene_text(R"({"dimension": 2, "set": {"ball": {"center": [0, 0], "radius": -1}}})");
  });
  CHECK(radius.find("/set/ball") != std::string::npos);
  CHECK(error_kind([] { parse_scene_text(R"({"dimension": 2, "set": {"ball": {"center": [0, 0, 0], "radius": 1}}})"); }) ==
        ErrorKind::ValidationError);
  CHECK(error_kind([] { parse_scene("/nonexistent/scene.json"); }) == ErrorKind::IoError);
}

}

TEST_SUITE("reports") {

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, -1.2732395447351628, 1e-300, 123456789.0, 0.0}) CHECK(std::stod(format_number(v)) == v);
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("emission is deterministic and round-trips") {
  CommandOptions o = command("eval");
  o.op = "truncated";
  o.points = {pt({0, 0, 0}), pt({0, 2, 0}), pt({0.5, 4, 0})};
  const Report r = run_command(fixture_scene("two-balls-r3"), o).report;
  for (ReportFormat f : {ReportFormat::Text, ReportFormat::Json, ReportFormat::Csv})
    CHECK(render_report(r, f) == render_report(r, f));

  const std::string csv = render_report(r, ReportFormat::Csv);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(o.points.size()) + 1);

  const std::string json = render_report(r, ReportFormat::Json);
  const Report back = report_from_json(json);
  CHECK(render_report(back, ReportFormat::Json) == json);
  REQUIRE(back.records.size() == r.records.size());
  CHECK(*back.records[0].value == *r.records[0].value);

  const auto path = (std::filesystem::temp_directory_path() / "fraclab_report_test.json").string();
  emit_report(r, ReportFormat::Json, path);
  CHECK(slurp(path) == json);
  std::filesystem::remove(path);
  CHECK(error_kind([&] { emit_report(r, ReportFormat::Json, "/nonexistent/dir/x.json"); }) == ErrorKind::IoError);
  CHECK(error_kind([] { report_from_json("{"); }) == ErrorKind::ParseError);
  CHECK(error_kind([] { parse_format("xml"); }) == ErrorKind::ValidationError);
}

}

TEST_SUITE("commands") {

TEST_CASE("point specifications") {
  const auto pts = parse_points("0,1;2,3", 2);
  REQUIRE(pts.size() == 2);
  CHECK(pts[1][1] == 3.0);
  const auto h = parse_points("halton:5:-2:2,-2:6,-2:2", 3);
  REQUIRE(h.size() == 5);
  CHECK(h[0][0] == 0.0);   // first Halton term in base 2 is 1/2
  CHECK(h[0][1] == doctest::Approx(-2.0 + 8.0 / 3.0));
  CHECK(error_kind([] { parse_points("1,2,3", 2); }) == ErrorKind::ValidationError);
  CHECK(error_kind([] { parse_points("1,x", 2); }) == ErrorKind::ParseError);
  CHECK(error_kind([] { parse_points("halton:3:0:1", 2); }) == ErrorKind::ValidationError);
}

TEST_CASE("eval on the getoor fixture") {
  CommandOptions o = command("eval");
  o.points = {pt({0})};
  const CommandResult res = run_command(fixture_scene("getoor"), o);
  REQUIRE(res.report.records.size() == 1);
  CHECK(std::abs(*res.report.records[0].value + 1.0) <= 1e-3);
  CHECK_FALSE(res.finding);
  CHECK_FALSE(res.errors);
}

TEST_CASE("geom affine at P_eps is a finding with a certificate") {
  CommandOptions o = command("geom");
  o.cond = "affine";
  o.k = 2;
  o.points = {pt({0, 0.1, 0.99499})};
  const CommandResult res = run_command(fixture_scene("two-balls-r3"), o);
  CHECK(res.finding);
  REQUIRE(res.report.records.size() == 1);
  CHECK(res.report.records[0].verdict == "fails");
  CHECK(res.report.records[0].witness_kind == "certificate");
  CHECK(contains(two_balls(), res.report.records[0].witness.front()));
}

TEST_CASE("verify indicator on the two balls") {
  CommandOptions o = command("verify");
  o.k = 2;
  o.points = parse_points("halton:10:-2:2,-2:6,-2:2", 3);
  const CommandResult res = run_command(fixture_scene("two-balls-r3"), o);
  CHECK_FALSE(res.finding);
  CHECK_FALSE(res.errors);
  bool all = false;
  for (const auto& [k, v] : res.report.summary)
    if (k == "certified") all = v == std::to_string(o.points.size());
  CHECK(all);
}

TEST_CASE("per-point errors become error records") {
  CommandOptions o = command("geom");
  o.k = 2;
  o.points = {pt({0, 0, 0}), pt({0, 2, 0})};
  const CommandResult res = run_command(fixture_scene("two-balls-r3"), o);
  CHECK(res.errors);
  CHECK(res.report.records[0].verdict == "error");
  CHECK(res.report.records[1].verdict == "holds");
}

TEST_CASE("exit codes") {
  CHECK(exit_code_for(ErrorKind::ParseError) == 1);
  CHECK(exit_code_for(ErrorKind::ValidationError) == 2);
  CHECK(exit_code_for(ErrorKind::OutOfRange) == 2);
  CHECK(exit_code_for(ErrorKind::NotSmooth) == 3);
  CommandOptions o = command("eval");
  o.s = 1.5;
  o.points = {pt({0})};
  CHECK(error_kind([&] { run_command(fixture_scene("getoor"), o); }) == ErrorKind::ValidationError);
}

}
