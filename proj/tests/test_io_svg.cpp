#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "nhchain/io.hpp"
#include "nhchain/svg.hpp"

using namespace nhchain;

TEST_CASE("CSV round trip preserves values exactly") {
  CsvTable t;
  t.header = {"a", "b"};
  t.rows = {{1.0 / 3.0, 2e-17}, {-4.5, 1e300}};
  const auto path = std::filesystem::temp_directory_path() / "nhchain_csv_test.csv";
  t.write(path);
  const auto r = CsvTable::read(path);
  REQUIRE(r.header == t.header);
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[0][0] == t.rows[0][0]);
  CHECK(r.rows[0][1] == t.rows[0][1]);
  CHECK(r.rows[1][1] == t.rows[1][1]);
  CHECK(r.column("b") == 1);
  CHECK(r.column("missing") == -1);
  CHECK(r.column_values("a")[1] == -4.5);
  std::filesystem::remove(path);
}

TEST_CASE("identical data renders byte-identical SVG") {
  auto build = [] {
    SvgPlot plot("title", "x", "y");
    plot.add_line({0, 1, 2}, {0.5, 0.25, 0.125}, "#1f77b4", "series");
    plot.add_points({0, 1, 2}, {0.4, 0.3, 0.2}, {0.05, 0.05, 0.05}, "#d62728", "pts");
    plot.add_hline(0.0, "gray");
    return plot.render();
  };
  CHECK(build() == build());
  CHECK(build().find("<svg") == 0);
}

TEST_CASE("empty series renders a valid no-data SVG") {
  SvgPlot plot("empty", "x", "y");
  const auto svg = plot.render();
  CHECK(svg.find("no data") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
}
