#include "alphamotion/archive.hpp"

#include <zlib.h>

#include <cstring>

namespace alphamotion
{

namespace
{

// 1980-01-01 00:00 in DOS format.
constexpr std::uint16_t kDosTime = 0;
constexpr std::uint16_t kDosDate = (0 << 9) | (1 << 5) | 1;

void put16(Bytes& b, std::uint16_t v)
{
    b.push_back(static_cast<std::uint8_t>(v & 0xff));
    b.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put32(Bytes& b, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i)
        b.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

std::uint16_t get16(const Bytes& b, std::size_t at)
{
    if (at + 2 > b.size())
        throw FormatError("zip: truncated archive");
    return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

std::uint32_t get32(const Bytes& b, std::size_t at)
{
    if (at + 4 > b.size())
        throw FormatError("zip: truncated archive");
    return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8) |
           (static_cast<std::uint32_t>(b[at + 2]) << 16) | (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

std::uint32_t crcOf(const Bytes& data)
{
    return static_cast<std::uint32_t>(crc32(0L, data.data(), static_cast<uInt>(data.size())));
}

} // namespace

Bytes writeZip(const std::vector<ArchiveMember>& members)
{
    Bytes out;
    Bytes central;
    for (const auto& m : members)
    {
        if (m.name.size() > 0xffff || m.data.size() > 0xffffffffULL)
            throw FormatError("zip: member too large: " + m.name);
        const auto offset = static_cast<std::uint32_t>(out.size());
        const std::uint32_t crc = crcOf(m.data);
        const auto size = static_cast<std::uint32_t>(m.data.size());
        const auto nameLen = static_cast<std::uint16_t>(m.name.size());

        put32(out, 0x04034b50);
        put16(out, 20);
        put16(out, 0);
        put16(out, 0);  // stored
        put16(out, kDosTime);
        put16(out, kDosDate);
        put32(out, crc);
        put32(out, size);
        put32(out, size);
        put16(out, nameLen);
        put16(out, 0);
        out.insert(out.end(), m.name.begin(), m.name.end());
        out.insert(out.end(), m.data.begin(), m.data.end());

        put32(central, 0x02014b50);
        put16(central, 20);
        put16(central, 20);
        put16(central, 0);
        put16(central, 0);
        put16(central, kDosTime);
        put16(central, kDosDate);
        put32(central, crc);
        put32(central, size);
        put32(central, size);
        put16(central, nameLen);
        put16(central, 0);
        put16(central, 0);
        put16(central, 0);
        put16(central, 0);
        put32(central, 0);
        put32(central, offset);
        central.insert(central.end(), m.name.begin(), m.name.end());
    }
    const auto centralOffset = static_cast<std::uint32_t>(out.size());
    out.insert(out.end(), central.begin(), central.end());
    put32(out, 0x06054b50);
    put16(out, 0);
    put16(out, 0);
    put16(out, static_cast<std::uint16_t>(members.size()));
    put16(out, static_cast<std::uint16_t>(members.size()));
    put32(out, static_cast<std::uint32_t>(central.size()));
    put32(out, centralOffset);
    put16(out, 0);
    return out;
}

std::vector<ArchiveMember> readZip(const Bytes& archive)
{
    if (archive.size() < 22)
        throw FormatError("zip: archive too small");
    std::size_t eocd = archive.size() - 22;
    while (get32(archive, eocd) != 0x06054b50)
    {
        if (eocd == 0)
            throw FormatError("zip: end of central directory not found");
        --eocd;
    }
    const std::uint16_t count = get16(archive, eocd + 10);
    std::size_t at = get32(archive, eocd + 16);

    std::vector<ArchiveMember> members;
    members.reserve(count);
    for (std::uint16_t i = 0; i < count; ++i)
    {
        if (get32(archive, at) != 0x02014b50)
            throw FormatError("zip: bad central directory entry");
        const std::uint16_t method = get16(archive, at + 10);
        const std::uint32_t crc = get32(archive, at + 16);
        const std::uint32_t csize = get32(archive, at + 20);
        const std::uint32_t usize = get32(archive, at + 24);
        const std::uint16_t nameLen = get16(archive, at + 28);
        const std::uint16_t extraLen = get16(archive, at + 30);
        const std::uint16_t commentLen = get16(archive, at + 32);
        const std::uint32_t local = get32(archive, at + 42);
        if (at + 46 + nameLen > archive.size())
            throw FormatError("zip: truncated central directory");
        std::string name(archive.begin() + static_cast<std::ptrdiff_t>(at + 46),
                         archive.begin() + static_cast<std::ptrdiff_t>(at + 46 + nameLen));
        if (method != 0 || csize != usize)
            throw FormatError("zip: compressed member not supported: " + name);

        if (get32(archive, local) != 0x04034b50)
            throw FormatError("zip: bad local header for " + name);
        const std::size_t dataAt = local + 30 + get16(archive, local + 26) + get16(archive, local + 28);
        if (dataAt + usize > archive.size())
            throw FormatError("zip: truncated member " + name);
        Bytes data(archive.begin() + static_cast<std::ptrdiff_t>(dataAt),
                   archive.begin() + static_cast<std::ptrdiff_t>(dataAt + usize));
        if (crcOf(data) != crc)
            throw FormatError("zip: CRC mismatch for " + name);
        members.push_back({std::move(name), std::move(data)});
        at += 46 + nameLen + extraLen + commentLen;
    }
    return members;
}

void extractZip(const Bytes& archive, const std::filesystem::path& root)
{
    for (const auto& m : readZip(archive))
    {
        const std::filesystem::path rel(m.name);
        if (rel.is_absolute() || m.name.find("..") != std::string::npos)
            throw FormatError("zip: member escapes extraction root: " + m.name);
        const auto dst = root / rel;
        std::filesystem::create_directories(dst.parent_path());
        writeFileBytes(dst, m.data);
    }
}

} // namespace alphamotion
