#include <fstream>

#include "command.hpp"
#include "signet/ingest.hpp"
#include "signet/io.hpp"

namespace signet::app {

namespace {

int ingest_contacts(Run& r) {
  std::ifstream cin(r.input("contacts"));
  const auto events = ingest::parse_contacts(cin);
  std::map<ingest::NodeId, std::string> metadata;
  if (const auto meta = r.optional_input("metadata")) {
    std::ifstream min(*meta);
    metadata = ingest::parse_metadata(min);
  }
  const auto index = ingest::NodeIndex::from_events(events, metadata);
  if (index.size() < 2) throw DataError("fewer than two nodes in the contact log");

  const auto utc_offset = r.get<long long>("utc_offset");
  ingest::BreakSchedule schedule;
  const auto overrides = r.get<std::vector<std::string>>("breaks");
  if (!overrides.empty()) {
    std::vector<ingest::Interval> clock;
    for (const auto& b : overrides) clock.push_back(ingest::parse_break_override(b));
    schedule = ingest::schedule_from_clock(events, clock, utc_offset);
    r.details()["break_source"] = "override";
  } else {
    ingest::BreakOptions opts;
    opts.bin_width = r.get<long long>("bin_width");
    opts.threshold = r.optional<double>("threshold");
    opts.utc_offset = utc_offset;
    opts.pooled = !r.get<bool>("per_day");
    const auto det = ingest::detect_breaks(events, opts);
    schedule = det.schedule;
    r.details()["break_source"] = "detected";
    r.details()["threshold"] = det.threshold;
  }

  ingest::WindowOptions wopts;
  wopts.window = r.get<long long>("window");
  wopts.resolution = r.get<long long>("resolution");
  wopts.keep_partial = r.get<bool>("keep_partial");
  const auto days = ingest::window_observations(events, schedule, index, wopts);

  r.write("id_map.tsv", [&](std::ostream& o) { index.write(o); });
  json breaks = json::array();
  r.write("breaks.tsv", [&](std::ostream& o) {
    o << "day\tstart\tend\tclock_start\tclock_end\n";
    for (const auto& [day, ivs] : schedule.days) {
      for (const auto& iv : ivs) {
        const auto cs = ingest::format_clock(ingest::time_of_day(iv.start, utc_offset));
        const auto ce = ingest::format_clock(iv.end - iv.start + ingest::time_of_day(iv.start, utc_offset));
        o << fmt::format("{}\t{}\t{}\t{}\t{}\n", day, iv.start, iv.end, cs, ce);
        breaks.push_back({{"day", day}, {"start", iv.start}, {"end", iv.end}, {"clock", cs + "-" + ce}});
      }
    }
  });

  json day_info = json::array();
  for (std::size_t d = 0; d < days.size(); ++d) {
    const auto& day = days[d];
    const auto dir = fmt::format("day_{}", d);
    if (!day.periods.empty()) {
      r.write(dir + "/observations.txt",
              [&](std::ostream& o) { write_observations(o, ObservationSet(day.periods)); });
    }
    r.write(dir + "/presence.tsv", [&](std::ostream& o) {
      o << "index\tpresent\n";
      for (std::size_t i = 0; i < day.present.size(); ++i) o << i << '\t' << (day.present[i] ? 1 : 0) << '\n';
    });
    r.write(dir + "/windows.tsv", [&](std::ostream& o) {
      o << "period\tstart\tend\ttrials\n";
      for (std::size_t s = 0; s < day.windows.size(); ++s) {
        o << fmt::format("{}\t{}\t{}\t{}\n", s, day.windows[s].start, day.windows[s].end,
                         day.periods[s].trials());
      }
    });
    day_info.push_back({{"dir", dir}, {"day", day.day}, {"periods", day.periods.size()}});
  }

  r.details()["trials"] = wopts.window / wopts.resolution;
  r.details()["nodes"] = index.size();
  r.details()["breaks"] = breaks;
  r.details()["days"] = day_info;
  r.finish();
  r.log() << fmt::format("{} events, {} nodes, {} day(s), t={}\n", events.size(), index.size(),
                         days.size(), wopts.window / wopts.resolution);
  return 0;
}

}  // namespace

CommandDef ingest_command() {
  const ingest::BreakOptions b;
  const ingest::WindowOptions w;
  CommandDef c;
  c.name = "ingest";
  c.help = "Turn a contact log into per-day windowed observation files";
  c.defaults = {{"contacts", nullptr},    {"metadata", nullptr},
                {"out", nullptr},         {"bin_width", b.bin_width},
                {"threshold", nullptr},   {"utc_offset", b.utc_offset},
                {"per_day", !b.pooled},   {"breaks", json::array()},
                {"window", w.window},     {"resolution", w.resolution},
                {"keep_partial", w.keep_partial}};
  c.add_flags = [](CLI::App& app, json& f) {
    option<std::string>(app, f, "--contacts", "contacts", "Contact log: timestamp i j class_i class_j");
    option<std::string>(app, f, "--metadata", "metadata", "Node metadata: id class ...");
    out_option(app, f);
    option<long long>(app, f, "--bin-width", "bin_width", "Seconds per bin for break detection");
    option<double>(app, f, "--threshold", "threshold", "Cross-class contacts per bin marking a break");
    option<long long>(app, f, "--utc-offset", "utc_offset", "Seconds added to timestamps to get local time");
    toggle(app, f, "--per-day", "per_day", true, "Detect breaks day by day instead of pooled");
    option<std::vector<std::string>>(app, f, "--break", "breaks",
                                     "Break as HH:MM+<minutes>m or HH:MM-HH:MM; skips detection");
    option<long long>(app, f, "--window", "window", "Window length in seconds");
    option<long long>(app, f, "--resolution", "resolution", "Slot length in seconds");
    toggle(app, f, "--keep-partial", "keep_partial", true, "Keep trailing partial windows");
  };
  c.body = ingest_contacts;
  return c;
}

}  // namespace signet::app
