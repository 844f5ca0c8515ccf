#include "panscope/file_io.hpp"

#include <fstream>
#include <iterator>
#include <system_error>

#include "panscope/error.hpp"

namespace panscope {

namespace fs = std::filesystem;

namespace {

void write_raw(const fs::path& path, const char* data, std::size_t size) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::io, "cannot open " + tmp.string() + " for writing");
        out.write(data, static_cast<std::streamsize>(size));
        out.flush();
        if (!out) throw Error(ErrorCode::io, "write failed: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(ErrorCode::io, "cannot move " + tmp.string() + " to " + path.string());
    }
}

} // namespace

void write_file_atomic(const fs::path& path, std::span<const std::uint8_t> bytes) {
    write_raw(path, reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

void write_file_atomic(const fs::path& path, std::string_view text) {
    write_raw(path, text.data(), text.size());
}

std::vector<std::uint8_t> read_file_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string read_file_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace panscope
