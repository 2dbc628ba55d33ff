#include <cmath>

#include <fmt/format.h>

#include "asrbench/error.hpp"
#include "asrbench/report.hpp"
#include "json.hpp"

namespace asrbench {

ReportFormat parse_report_format(std::string_view name) {
  if (name == "json") return ReportFormat::json;
  if (name == "csv") return ReportFormat::csv;
  if (name == "markdown" || name == "md") return ReportFormat::markdown;
  if (name == "html") return ReportFormat::html;
  throw ReportError(fmt::format("unknown report format: {}", name));
}

std::string_view extension(ReportFormat format) {
  switch (format) {
    case ReportFormat::json: return "json";
    case ReportFormat::csv: return "csv";
    case ReportFormat::markdown: return "md";
    case ReportFormat::html: return "html";
  }
  return "json";
}

namespace {

std::string fixed2(double v) {
  std::string s = fmt::format("{:.2f}", v);
  if (s == "-0.00") s = "0.00";
  return s;
}

double round2(double v) { return std::round(v * 100.0) / 100.0; }

std::string cell(const LeaderboardRow& row, const std::string& column) {
  const auto it = row.per_column_wer.find(column);
  return it == row.per_column_wer.end() ? "-" : fixed2(it->second);
}

std::string rtfx_cell(const LeaderboardRow& row) { return row.rtfx ? fixed2(*row.rtfx) : "-"; }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string md_field(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|') {
      out += "\\|";
    } else if (c == '\n') {
      out += ' ';
    } else {
      out += c;
    }
  }
  return out;
}

std::string html_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string track_title(Track track) {
  switch (track) {
    case Track::leaderboard: return "English short-form";
    case Track::multilingual: return "Multilingual";
    case Track::longform: return "Long-form";
  }
  return "";
}

std::string render_json(const Leaderboard& board) {
  nlohmann::ordered_json j;
  j["track"] = std::string(to_string(board.track));
  j["columns"] = board.columns;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : board.rows) {
    nlohmann::ordered_json r;
    r["rank"] = row.rank;
    r["model_id"] = row.model_id;
    r["display_name"] = row.card.display_name;
    r["organization"] = row.card.organization;
    r["open_source"] = row.card.open_source;
    r["encoder"] = row.card.encoder_family;
    r["decoder"] = row.card.decoder_family;
    r["n_languages"] = row.card.n_languages;
    r["avg_wer"] = round2(row.avg_wer);
    r["rtfx"] = row.rtfx ? nlohmann::ordered_json(round2(*row.rtfx)) : nlohmann::ordered_json(nullptr);
    nlohmann::ordered_json cols = nlohmann::ordered_json::object();
    for (const auto& c : board.columns) {
      const auto it = row.per_column_wer.find(c);
      cols[c] = it == row.per_column_wer.end() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(round2(it->second));
    }
    r["wer"] = std::move(cols);
    j["rows"].push_back(std::move(r));
  }
  j["warnings"] = board.warnings;
  return j.dump(2) + "\n";
}

std::string render_csv(const Leaderboard& board) {
  std::string out = "rank,model,avg_wer,rtfx,open,encoder,decoder,n_languages";
  for (const auto& c : board.columns) out += "," + csv_field(c);
  out += "\n";
  for (const auto& row : board.rows) {
    out += fmt::format("{},{},{},{},{},{},{},{}", row.rank, csv_field(row.model_id), fixed2(row.avg_wer),
                       rtfx_cell(row), row.card.open_source ? "yes" : "no", csv_field(row.card.encoder_family),
                       csv_field(row.card.decoder_family), row.card.n_languages);
    for (const auto& c : board.columns) out += "," + cell(row, c);
    out += "\n";
  }
  return out;
}

std::string render_markdown(const Leaderboard& board) {
  std::string out = fmt::format("# {} leaderboard\n\n", track_title(board.track));
  out += "| Rank | Model | Open | Encoder | Decoder | # Lang. | Avg. WER | RTFx |";
  for (const auto& c : board.columns) out += " " + md_field(c) + " |";
  out += "\n|---:|---|:---:|---|---|---:|---:|---:|";
  for (std::size_t i = 0; i < board.columns.size(); ++i) out += "---:|";
  out += "\n";
  for (const auto& row : board.rows) {
    out += fmt::format("| {} | {} | {} | {} | {} | {} | {} | {} |", row.rank, md_field(row.card.display_name),
                       row.card.open_source ? "yes" : "no", md_field(row.card.encoder_family),
                       md_field(row.card.decoder_family), row.card.n_languages, fixed2(row.avg_wer), rtfx_cell(row));
    for (const auto& c : board.columns) out += " " + cell(row, c) + " |";
    out += "\n";
  }
  if (!board.warnings.empty()) {
    out += "\n";
    for (const auto& w : board.warnings) out += "- " + md_field(w) + "\n";
  }
  return out;
}

constexpr std::string_view kHtmlHead = R"(<!DOCTYPE html>
<html lang="en">
<head>
<meta charset="utf-8">
<title>{title} leaderboard</title>
<style>
body {{ font-family: system-ui, sans-serif; margin: 2rem; color: #222; }}
table {{ border-collapse: collapse; }}
th, td {{ padding: 0.3rem 0.7rem; border-bottom: 1px solid #ddd; }}
th {{ cursor: pointer; user-select: none; background: #f4f4f4; }}
th.asc::after {{ content: " \25B2"; }}
th.desc::after {{ content: " \25BC"; }}
td.num {{ text-align: right; font-variant-numeric: tabular-nums; }}
</style>
</head>
<body>
<h1>{title} leaderboard</h1>
<p>WER in percent, lower is better. RTFx is audio duration over transcription time, higher is better.</p>
<table id="board">
<thead>
<tr>)";

constexpr std::string_view kHtmlTail = R"(</tbody>
</table>
<script>
(function () {
  var table = document.getElementById("board");
  var headers = table.tHead.rows[0].cells;
  function key(cell, numeric) {
    var v = cell.getAttribute("data-v");
    if (!numeric) return cell.textContent.toLowerCase();
    return v === "" ? Infinity : parseFloat(v);
  }
  Array.prototype.forEach.call(headers, function (th, col) {
    th.addEventListener("click", function () {
      var numeric = th.getAttribute("data-type") === "num";
      var asc = !th.classList.contains("asc");
      Array.prototype.forEach.call(headers, function (h) { h.classList.remove("asc", "desc"); });
      th.classList.add(asc ? "asc" : "desc");
      var body = table.tBodies[0];
      var rows = Array.prototype.slice.call(body.rows);
      rows.sort(function (a, b) {
        var x = key(a.cells[col], numeric), y = key(b.cells[col], numeric);
        if (x === y) return 0;
        return (x < y ? -1 : 1) * (asc ? 1 : -1);
      });
      rows.forEach(function (r) { body.appendChild(r); });
    });
  });
})();
</script>
</body>
</html>
)";

std::string html_num(const std::string& text, std::optional<double> value) {
  return fmt::format("<td class=\"num\" data-v=\"{}\">{}</td>", value ? fmt::format("{:.6f}", *value) : "", text);
}

std::string render_html(const Leaderboard& board) {
  std::string out = fmt::format(kHtmlHead, fmt::arg("title", html_escape(track_title(board.track))));
  const auto th = [](std::string_view label, bool numeric) {
    return fmt::format("<th data-type=\"{}\">{}</th>", numeric ? "num" : "text", label);
  };
  out += th("Rank", true) + th("Model", false) + th("Open", false) + th("Encoder", false) + th("Decoder", false) +
         th("# Lang.", true) + th("Avg. WER", true) + th("RTFx", true);
  for (const auto& c : board.columns) out += th(html_escape(c), true);
  out += "</tr>\n</thead>\n<tbody>\n";
  for (const auto& row : board.rows) {
    out += "<tr>";
    out += html_num(std::to_string(row.rank), static_cast<double>(row.rank));
    out += fmt::format("<td title=\"{}\">{}</td>", html_escape(row.model_id), html_escape(row.card.display_name));
    out += fmt::format("<td>{}</td>", row.card.open_source ? "yes" : "no");
    out += fmt::format("<td>{}</td><td>{}</td>", html_escape(row.card.encoder_family),
                       html_escape(row.card.decoder_family));
    out += html_num(std::to_string(row.card.n_languages), static_cast<double>(row.card.n_languages));
    out += html_num(fixed2(row.avg_wer), row.avg_wer);
    out += html_num(rtfx_cell(row), row.rtfx);
    for (const auto& c : board.columns) {
      const auto it = row.per_column_wer.find(c);
      out += html_num(cell(row, c),
                      it == row.per_column_wer.end() ? std::nullopt : std::optional<double>(it->second));
    }
    out += "</tr>\n";
  }
  out += kHtmlTail;
  return out;
}

}  // namespace

std::string render(const Leaderboard& board, ReportFormat format) {
  switch (format) {
    case ReportFormat::json: return render_json(board);
    case ReportFormat::csv: return render_csv(board);
    case ReportFormat::markdown: return render_markdown(board);
    case ReportFormat::html: return render_html(board);
  }
  throw ReportError("unknown report format");
}

}  // namespace asrbench
