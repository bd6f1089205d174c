#pragma once

#include "alphamotion/image_io.hpp"

#include <string>
#include <utility>
#include <vector>

namespace alphamotion
{

struct ArchiveMember
{
    std::string name;
    Bytes data;

    bool operator==(const ArchiveMember&) const = default;
};

// Uncompressed (stored) zip with fixed timestamps, so identical members give
// identical bytes.
Bytes writeZip(const std::vector<ArchiveMember>& members);

// Reads archives produced by writeZip; rejects compressed members and CRC
// mismatches with FormatError.
std::vector<ArchiveMember> readZip(const Bytes& archive);

// Writes every member below root, creating directories as needed. Member
// names may not escape root.
void extractZip(const Bytes& archive, const std::filesystem::path& root);

} // namespace alphamotion
