#include "fixtures.h"

#include <unistd.h>

#include <atomic>
#include <cstdlib>

namespace webqa::testing {

namespace {

std::string title_case(const std::string& text) {
  std::string out = text;
  bool start = true;
  for (char& c : out) {
    if (c == ' ') {
      start = true;
      continue;
    }
    if (start && c >= 'a' && c <= 'z') c = static_cast<char>(c - ('a' - 'A'));
    start = false;
  }
  return out;
}

Example make_example(std::string id, std::string question, std::vector<std::string> answers,
                     std::vector<std::pair<std::string, std::string>> snippets,
                     std::vector<int> ranks, std::vector<std::string> tags) {
  Example ex;
  ex.id = std::move(id);
  ex.question = std::move(question);
  ex.gold_answers = std::move(answers);
  for (std::size_t i = 0; i < snippets.size(); ++i) {
    Snippet s;
    s.title = std::move(snippets[i].first);
    s.body = std::move(snippets[i].second);
    s.rank = ranks.empty() ? static_cast<int>(i + 1) : ranks[i];
    ex.result_set.snippets.push_back(std::move(s));
  }
  if (!tags.empty()) {
    std::set<CompositionalityTag> parsed;
    for (const auto& t : tags) parsed.insert(*tag_from_name(t));
    ex.tags = std::move(parsed);
  }
  return ex;
}

Example who_played(const std::string& id, const std::string& role, const std::string& work,
                   const std::string& actor, const std::string& year, const std::string& city,
                   const std::string& flavor, const std::string& quality) {
  const std::string role_tc = title_case(role);
  const std::string work_tc = title_case(work);
  return make_example(
      id, "who played " + role + " in " + work + "?", {actor},
      {{work_tc + " (TV Series) - Full Cast",
        work_tc + " follows " + flavor + ". The role of " + role_tc + " is played by " + actor +
            ", with a score performed by the city ensemble."},
       {actor + " - Biography",
        actor + " is an actor known for playing " + role_tc + " in " + work_tc +
            ". Born in " + year + " in " + title_case(city) +
            ", the actor trained at the riverside academy."},
       {work_tc + " Review - Screen Weekly",
        "Critics praised " + work_tc + " this season. " + actor + " brings " + quality +
            " to " + role_tc + " and carries every scene."},
       {"", "Forum: favorite " + work + " moments? The sets were built in a warehouse near "
            "the old docks, according to the production notes."},
       {title_case(city) + " Gazette",
        "Local news: the lantern festival returns to " + title_case(city) +
            " this spring with music, food stalls and a parade."}},
      {1, 2, 3, 5, 6}, {"Nary"});
}

Example capital_of(const std::string& id, const std::string& country, const std::string& city,
                   const std::string& river) {
  const std::string country_tc = title_case(country);
  const std::string city_tc = title_case(city);
  return make_example(
      id, "what is the capital of " + country + "?", {city_tc},
      {{city_tc + " - Travel Guide",
        city_tc + " is the capital of " + country_tc + " and sits on the " + title_case(river) +
            " river. Its old town draws visitors each summer."},
       {country_tc + " Overview",
        "The republic of " + country_tc + " has its seat of government in " + city_tc +
            ". Parliament meets in the stone hall by the market square."},
       {"Geography Quiz Answers",
        "Question four: the capital of " + country + " is " + city +
            ". Question five covers the longest river in the region."},
       {"Cooking Weekly",
        "A simple stew: onions, carrots, beans and patience. Serve with dark bread and "
            "a glass of cold water."}},
      {}, {"Simple"});
}

Example born_in(const std::string& id, const std::string& person, const std::string& year) {
  return make_example(
      id, "when was " + lowercase(person) + " born?", {year},
      {{person + " - Biography",
        person + " was born in " + year + " and grew up near the coast. Early work included "
            "radio plays and a travelling stage show."},
       {"Interview: " + person,
        "Asked about the early days, " + person + " laughed. Born in " + year +
            ", the actor still cycles to every rehearsal."},
       {"Town History",
        "The church tower, finished in 1701, survived two fires, a flood and one very "
            "determined flock of pigeons."}},
      {}, {"Simple"});
}

std::vector<Example> build_toy_corpus() {
  std::vector<Example> out;

  out.push_back(who_played("toy-001", "mara quin", "starfall", "Nora Hale", "1952", "larenport",
                           "the crew of a drifting station", "warmth"));
  out.push_back(who_played("toy-002", "davin rook", "emberfall", "Liam Satter", "1960",
                           "veldora", "a family of glassblowers", "menace"));
  out.push_back(who_played("toy-003", "the detective", "harbor lights", "Renn Doyle", "1971",
                           "kestwick", "a harbor detective who never sleeps", "patience"));
  out.push_back(who_played("toy-004", "tessa wolfe", "midnight arcade", "Ivy Calder", "1980",
                           "aldmere", "an arcade that never closes", "mischief"));
  out.push_back(who_played("toy-005", "the pilot", "skybound", "Omar Vance", "1955", "larenport",
                           "a cargo pilot flying storm routes", "calm"));
  out.push_back(who_played("toy-006", "kip larsen", "the glass city", "Theo Marsh", "1987",
                           "veldora", "a city sealed under glass", "fury"));
  out.push_back(who_played("toy-007", "sera dunn", "paper moons", "June Albright", "1949",
                           "kestwick", "two rival puppeteers", "grace"));
  out.push_back(who_played("toy-008", "the chef", "copper kitchen", "Marco Bell", "1966",
                           "aldmere", "a kitchen brigade at war", "precision"));

  out.push_back(capital_of("toy-009", "norland", "veldora", "silver"));
  out.push_back(capital_of("toy-010", "suvania", "kestwick", "gray"));
  out.push_back(capital_of("toy-011", "tirmore", "aldmere", "white"));

  out.push_back(born_in("toy-012", "Nora Hale", "1952"));
  out.push_back(born_in("toy-013", "Theo Marsh", "1987"));

  out.push_back(make_example(
      "toy-014", "which river flows through larenport?", {"Silver River"},
      {{"Rivers of the Region",
        "The Silver River flows through Larenport toward the sea, passing under the old "
            "bridge and the fish market."},
       {"Larenport - Visitor Guide",
        "Walk along the Silver River at dusk and you will see the lantern boats. The "
            "harbor opens at dawn."},
       {"Angling Monthly",
        "Trout season opens late this year. Pack waders, patience and a spare reel."}},
      {}, {"Filter"}));

  out.push_back(make_example(
      "toy-015", "what films did mira voss star in that ken toll directed?",
      {"Night Harbor", "Glass City"},
      {{"Mira Voss - Filmography",
        "Mira Voss starred in Night Harbor, directed by Ken Toll, and returned for his "
            "follow-up two years later."},
       {"Ken Toll Retrospective",
        "Glass City, another Ken Toll film starring Mira Voss, closes the retrospective "
            "on Sunday night."},
       {"Night Harbor Review",
        "Night Harbor is a slow tide of a film. Mira Voss anchors it; Ken Toll trusts "
            "the silence."},
       {"Festival Notes",
        "Tickets for the closing gala sold out in an hour. The lobby bar did brisk "
            "trade in cold tea."}},
      {}, {"Conjunction", "Nary"}));

  out.push_back(who_played("toy-016", "the queen", "thornwood", "Edda Lorne", "1944", "larenport",
                           "a court of thorns and letters", "steel"));
  out.push_back(who_played("toy-017", "finn abel", "river kings", "Col Brandt", "1975",
                           "kestwick", "smugglers on the spring flood", "swagger"));

  // Gold answers absent from every snippet: these three must be dropped.
  out.push_back(make_example(
      "toy-018", "who discovered the zephyr stone?", {"Orin Blackwood"},
      {{"The Zephyr Stone - Museum",
        "The zephyr stone sits in the Larenport museum behind glass. Its discoverer "
            "remains disputed among historians."},
       {"Minerals Weekly",
        "Collectors argue about provenance more than price. The zephyr stone is no "
            "exception, with three rival claims."}},
      {}, {"Simple"}));
  out.push_back(make_example(
      "toy-019", "what is the tallest mountain in suvania?", {"Mount Kelvarn"},
      {{"Suvania Geography",
        "Suvania's uplands rise gently toward the northern border. Hikers favor the "
            "long ridge trails in autumn."},
       {"Trail Notes",
        "Carry water past the tree line. The huts close early when the fog rolls in "
            "from the coast."}},
      {}, {"Superlative"}));
  out.push_back(make_example(
      "toy-020", "when was the larenport bridge built?", {"1844"},
      {{"Larenport Bridge",
        "The larenport bridge spans the Silver River. Repairs in 1901 replaced the "
            "wooden deck with iron plates."},
       {"Bridge Walks",
        "Start at the fish market, cross at noon, and count the barges. The toll house "
            "dates from 1903."}},
      {}, {"Other"}));

  return out;
}

}  // namespace

const std::vector<Example>& toy_corpus() {
  static const std::vector<Example> corpus = build_toy_corpus();
  return corpus;
}

EmbeddingTable toy_embeddings() {
  EmbeddingTable table;
  table.dimension = 4;
  auto put = [&table](const std::string& w, float a, float b, float c, float d) {
    table.vectors[w] = {a, b, c, d};
  };
  // Film cluster.
  put("played", 1.0f, 0.2f, 0.0f, 0.0f);
  put("playing", 0.9f, 0.3f, 0.0f, 0.1f);
  put("starred", 0.8f, 0.4f, 0.0f, 0.0f);
  put("star", 0.8f, 0.5f, 0.1f, 0.0f);
  put("actor", 0.7f, 0.5f, 0.0f, 0.2f);
  put("role", 0.9f, 0.1f, 0.1f, 0.0f);
  put("film", 0.6f, 0.6f, 0.0f, 0.0f);
  put("films", 0.6f, 0.6f, 0.1f, 0.0f);
  put("directed", 0.5f, 0.7f, 0.0f, 0.1f);
  // Geography cluster.
  put("capital", 0.0f, 0.1f, 1.0f, 0.2f);
  put("city", 0.1f, 0.0f, 0.9f, 0.3f);
  put("river", 0.0f, 0.0f, 0.8f, 0.5f);
  put("flows", 0.0f, 0.1f, 0.7f, 0.6f);
  put("mountain", 0.0f, 0.0f, 0.6f, 0.7f);
  // Time cluster.
  put("born", 0.1f, 0.0f, 0.0f, 1.0f);
  put("built", 0.0f, 0.1f, 0.2f, 0.9f);
  put("year", 0.0f, 0.0f, 0.1f, 1.0f);
  return table;
}

std::filesystem::path fixture_dir() { return std::filesystem::path(WEBQA_FIXTURE_DIR); }

std::filesystem::path scratch_dir(const std::string& label) {
  static std::atomic<int> counter{0};
  const auto dir = std::filesystem::temp_directory_path() /
                   ("webqa_test_" + label + "_" + std::to_string(counter.fetch_add(1)) + "_" +
                    std::to_string(static_cast<unsigned>(::getpid())));
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace webqa::testing
