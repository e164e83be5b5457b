#ifndef FHT_IO_HPP
#define FHT_IO_HPP

#include <iosfwd>
#include <string>

#include "fht/model.hpp"

namespace fht {

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Model spec files: `key = value` lines plus one `row <i> = e1, e2, ...`
// line per transition row, 1-based state labels. See README for the format.
ModelSpec read_model_file(const std::string& path);
void write_model_file(const std::string& path, const ModelSpec& spec);

// Dataset files: a versioned header line, then one record per line:
//   z_1 .. z_p ; delta ; hit_time ; y_0,y_1,...,y_m
// with 1-based state labels.
void write_dataset(std::ostream& os, const Dataset& ds);
void write_dataset_file(const std::string& path, const Dataset& ds);
Dataset read_dataset(std::istream& is, const std::string& origin = "<stream>");
Dataset read_dataset_file(const std::string& path);

// Canonical float formatting used in every text output ("%.17g": round-trip
// exact, so identical values always serialize to identical bytes).
std::string format_double(double v);

}  // namespace fht

#endif
