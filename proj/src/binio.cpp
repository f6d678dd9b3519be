#include "catune/binio.hpp"

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "catune/errors.hpp"

namespace catune {

namespace {

std::array<std::uint32_t, 256> make_crc_table() {
    std::array<std::uint32_t, 256> table{};
    for (std::uint32_t i = 0; i < 256; ++i) {
        std::uint32_t c = i;
        for (int k = 0; k < 8; ++k)
            c = (c & 1u) ? (0xEDB88320u ^ (c >> 1)) : (c >> 1);
        table[i] = c;
    }
    return table;
}

}  // namespace

std::uint32_t crc32(const void* data, std::size_t len, std::uint32_t seed) {
    static const auto table = make_crc_table();
    const auto* p = static_cast<const std::uint8_t*>(data);
    std::uint32_t c = seed ^ 0xFFFFFFFFu;
    for (std::size_t i = 0; i < len; ++i)
        c = table[(c ^ p[i]) & 0xFFu] ^ (c >> 8);
    return c ^ 0xFFFFFFFFu;
}

std::string ByteReader::str() {
    const std::uint32_t n = u32();
    const std::uint8_t* p = take(n);
    return std::string(reinterpret_cast<const char*>(p), n);
}

const std::uint8_t* ByteReader::take(std::size_t n) {
    if (pos_ + n > size_)
        throw TruncatedFileError("unexpected end of data at offset " + std::to_string(pos_));
    const std::uint8_t* p = data_ + pos_;
    pos_ += n;
    return p;
}

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    in.seekg(0, std::ios::end);
    const auto size = static_cast<std::size_t>(in.tellg());
    in.seekg(0, std::ios::beg);
    std::vector<std::uint8_t> buf(size);
    if (size > 0) in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(size));
    if (!in) throw IoError("read failed: " + path);
    return buf;
}

void write_file_atomic(const std::string& path, const void* data, std::size_t size) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open file for writing: " + tmp);
        out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
        if (!out) throw IoError("write failed: " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("rename failed: " + tmp + " -> " + path + ": " + ec.message());
}

void write_file_atomic(const std::string& path, const std::string& text) {
    write_file_atomic(path, text.data(), text.size());
}

void write_container(const std::string& path, const char magic[8],
                     std::uint32_t version, const ByteWriter& payload) {
    ByteWriter out;
    out.bytes(magic, 8);
    out.u32(version);
    out.bytes(payload.data().data(), payload.data().size());
    out.u32(crc32(payload.data().data(), payload.data().size()));
    write_file_atomic(path, out.data().data(), out.data().size());
}

std::vector<std::uint8_t> read_container(const std::string& path, const char magic[8],
                                         std::uint32_t expected_version) {
    const auto buf = read_file(path);
    if (buf.size() < 8 + 4 + 4) throw TruncatedFileError("file too short: " + path);
    if (std::memcmp(buf.data(), magic, 8) != 0)
        throw ParseError("bad magic in " + path + " (expected " + std::string(magic, 8) + ")");
    ByteReader header(buf.data() + 8, 4);
    const std::uint32_t version = header.u32();
    if (version != expected_version)
        throw VersionMismatchError("unsupported format version " + std::to_string(version) +
                                   " in " + path + " (expected " +
                                   std::to_string(expected_version) + ")");
    const std::size_t payload_size = buf.size() - 8 - 4 - 4;
    const std::uint8_t* payload = buf.data() + 12;
    ByteReader trailer(buf.data() + buf.size() - 4, 4);
    const std::uint32_t stored = trailer.u32();
    const std::uint32_t actual = crc32(payload, payload_size);
    if (stored != actual)
        throw ChecksumError("checksum mismatch in " + path);
    return std::vector<std::uint8_t>(payload, payload + payload_size);
}

}  // namespace catune
