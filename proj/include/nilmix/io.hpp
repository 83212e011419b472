#pragma once

// JSON and CSV conversion for systems, matrices, observables and profiles,
// and atomic file output.

#include "nilmix/catalog.hpp"
#include "nilmix/fracsolve.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace nilmix::io {

using json = nlohmann::ordered_json;

/// Integer, or a string "p/q".
Rational rational_from_json(const json& j);
json rational_to_json(const Rational& q);

/// Array of rows.
exactlin::RationalMatrix matrix_from_json(const json& j);
json matrix_to_json(const exactlin::RationalMatrix& m);
RationalVector rational_vector_from_json(const json& j);
json rational_vector_to_json(const RationalVector& v);
IntVector int_vector_from_json(const json& j);

/// A catalog name, or {"dim", "layers", "brackets": [{"i", "j", "value"}],
/// "generators"} with layers the first basis index of every layer.
System system_from_json(const json& j);
json system_to_json(const System& s);

/// {"dim": d, "coeffs": [{"z": [..], "re": .., "im": ..}]}
fracsolve::FourierObservable observable_from_json(const json& j);
json observable_to_json(const fracsolve::FourierObservable& f);

/// CSV rows "x,xi" with an optional header row.
fracsolve::Profile profile_from_csv(const std::string& text, std::string name);

/// Shortest round-trip decimal form with '.' as separator.
std::string format_double(double x);

std::string read_file(const std::filesystem::path& path);
/// Writes to a temporary file in the same directory and renames it.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Throws InputError naming the first key of `j` not in `allowed`.
void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where);

}  // namespace nilmix::io
