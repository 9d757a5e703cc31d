#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "pdm/backlund.hpp"
#include "pdm/config.hpp"
#include "pdm/coordmap.hpp"
#include "pdm/suites.hpp"

namespace pdm {

using ojson = nlohmann::ordered_json;

// Report body first, then a separate "metadata" object. The body holds no
// times or paths, so the same config always gives the same bytes.
ojson report_json(const RunConfig& cfg, const std::vector<SuiteResult>& results);
std::string report_csv(const std::vector<SuiteResult>& results);
std::string report_table(const RunConfig& cfg, const std::vector<SuiteResult>& results);

// Columns x, re, im (header names may be replaced).
void write_csv(std::ostream& os, const SampledFunction& f, const std::string& re_name = "re",
               const std::string& im_name = "im");
ojson to_json(const SampledFunction& f);
ojson to_json(const CoordinateMap& m);
ojson to_json(const BacklundChain& chain, const ClosureReport& closure);

// uint64 n (little endian), then n*n row-major (re, im) float64 pairs.
void write_matrix_binary(std::ostream& os, const OperatorMatrix& m);
OperatorMatrix read_matrix_binary(std::istream& is, const GridPtr& g);
// One matrix row per line as re_0,im_0,re_1,im_1,...; refused above max_n.
void write_matrix_csv(std::ostream& os, const OperatorMatrix& m, std::size_t max_n = 201);

const std::vector<std::string>& export_kinds();
// Writes the files of one export kind into out_dir and returns their paths.
std::vector<std::string> export_plotdata(const RunConfig& cfg, const std::string& what, const std::string& out_dir);

}  // namespace pdm
