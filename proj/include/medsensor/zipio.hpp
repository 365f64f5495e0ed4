#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace medsensor::zipio {

using Bytes = std::vector<std::uint8_t>;

// Parses a zip archive held in memory. Supports stored and deflated entries.
// Throws medsensor::Error on structural problems.
std::map<std::string, Bytes> read_archive(const Bytes& data);

// Builds a zip archive with stored (uncompressed) entries, in the given order.
// Fixed DOS timestamp so identical inputs produce identical bytes.
Bytes write_archive(const std::vector<std::pair<std::string, Bytes>>& entries);

Bytes read_file(const std::string& path);
void write_file(const std::string& path, const Bytes& data);

}  // namespace medsensor::zipio
