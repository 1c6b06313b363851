#!/usr/bin/env python3
"""Regenerates the synthetic sample set, mock rules, search fixtures and plan.

Every name below is fictional. The construction guarantees, per sample:
  * the answer-bearing sentence carries the intent cue;
  * one sentence carries all keywords but not the answer (SenP removes it);
  * background-noise snippets mention no keyword, cue or answer;
  * question-search snippets overlap the question more than any CoE
    sentence but carry neither the cue nor the answer.
"""
import hashlib
import json
import os
import shutil

HERE = os.path.dirname(os.path.abspath(__file__))

CUES = {
    "City address Information": ["has its head office in"],
    "Nationality of person": ["citizen of"],
    "Birth date of person": ["was born on"],
    "Population of city": ["population of"],
}

HOTELS = [
    # family, group, city, wrong city, founded
    ("Varenne", "Varenne Hospitality Group", "Port Elsin", "Calvarra", 1932),
    ("Castellan", "Castellan Lodging Trust", "Nettlebridge", "Mirefield", 1951),
    ("Moravec", "Moravec Grand Hotels", "Ostrand", "Selwick", 1968),
    ("Ildori", "Ildori Resorts", "Carrow Sound", "Dunmere", 1947),
    ("Brannock", "Brannock House Hotels", "Westhollow", "Aldergate", 1979),
]
SPOUSES = [
    # person, profession, spouse, demonym, country, wrong demonym
    ("Aldous Venn", "painter", "Mira Soltane", "Veldrian", "Veldria", "Corsican"),
    ("Tobias Quarrel", "cartographer", "Lene Vasko", "Ostmarkish", "Ostmark", "Dalmish"),
    ("Hale Orrin", "composer", "Ysolde Prane", "Tarvic", "Tarvia", "Kessish"),
    ("Corwin Blyth", "architect", "Anja Rell", "Sorrenian", "Sorrenia", "Valdic"),
    ("Piers Calloway", "novelist", "Ines Moraud", "Lunesian", "Lunesia", "Brevish"),
]
FOUNDERS = [
    # company, industry, founder, date, wrong date
    ("Quillfeather Instruments", "precision optics", "Edric Hollow", "March 3, 1921", "July 19, 1934"),
    ("Brightwater Looms", "textile", "Sabine Okoro", "November 12, 1898", "February 7, 1903"),
    ("Halvard Motors", "automotive", "Jonas Halvard", "June 28, 1905", "October 2, 1911"),
    ("Copperline Press", "publishing", "Maud Feraday", "January 9, 1947", "August 30, 1952"),
    ("Northvale Ceramics", "pottery", "Ansel Grieve", "September 15, 1889", "May 4, 1894"),
]
TEAMS = [
    # team, stadium, city, population, wrong population
    ("Harrowgate Kestrels", "Lantern Park", "Brackmoor", "48,213", "61,507"),
    ("Fenwick Otters", "Reedside Ground", "Talmouth", "132,870", "98,416"),
    ("Culver Ironsides", "Foundry Field", "Ashcombe", "27,954", "35,208"),
    ("Saltmarsh Herons", "Estuary Stadium", "Pellworth", "75,031", "82,669"),
    ("Greyridge Stags", "Highmoor Arena", "Kilbrennan", "210,448", "187,392"),
]

NOISE_BANK = [
    "Tidal ranges along shallow coasts can exceed several metres during spring tides.",
    "Mosses reproduce through spores and thrive in damp, shaded environments.",
    "Mechanical clocks rely on an escapement to release energy at regular intervals.",
    "Sourdough bread is leavened by a culture of wild yeast and lactic acid bacteria.",
    "Glaciers carve U-shaped valleys as they slowly advance and retreat over millennia.",
    "Honeybees communicate the location of flowers through a waggle dance.",
    "Basalt forms when lava rich in iron and magnesium cools quickly at the surface.",
    "Early printing presses used movable type arranged by hand, letter by letter.",
    "Lighthouses once burned whale oil before the spread of kerosene and electric lamps.",
    "The violin family includes the viola, the cello and the double bass.",
    "Terraced farming reduces soil erosion on steep hillsides and conserves water.",
    "A solar eclipse occurs when the Moon passes between the Earth and the Sun.",
    "Coral reefs are built over centuries by colonies of tiny marine animals.",
    "Windmills were used for grinding grain long before they generated electricity.",
    "Origami traditionally uses a single square sheet folded without cuts or glue.",
    "Owls can rotate their heads a long way because of extra neck vertebrae.",
    "Salt was so valuable in antiquity that it was traded across deserts by caravan.",
    "Limestone caves form as slightly acidic groundwater dissolves the surrounding rock over long periods of time.",
    "The first suspension bridges used iron chains rather than the steel cables common today.",
    "Migratory birds navigate using the sun, the stars and the magnetic field of the planet.",
    "Tea plants grow best in acidic soil at elevations with frequent mist.",
    "Sundials tell time by the shadow of a gnomon cast on a marked dial.",
    "Volcanic soils are often very fertile because of their high mineral content.",
    "Stained glass gets its colours from metallic salts added during manufacture.",
    "Rivers deposit sediment at their mouths, sometimes forming broad deltas.",
    "Penguins cannot fly, but they are agile swimmers that hunt fish and krill underwater for long stretches.",
    "Paper was first made from mulberry bark, hemp and old rags.",
    "Cacti store water in thick stems and have spines instead of leaves.",
    "Canal locks raise and lower boats between stretches of water at different levels.",
    "Frost forms when water vapour freezes directly onto cold surfaces overnight.",
    "The abacus remained a common counting tool for merchants for many centuries across several continents.",
    "Beavers build dams from branches and mud, creating ponds that shelter their lodges.",
    "Wool fibres trap air, which is why woollen garments keep the wearer warm.",
    "Sand dunes migrate as wind moves grains up one slope and down the other.",
    "Ancient mariners navigated by the stars, using simple instruments to estimate latitude at sea.",
    "Hot springs are heated by geothermal energy from deep within the crust.",
    "Bamboo is among the fastest-growing plants and can be harvested within a few years.",
    "Chalk consists mostly of the microscopic shells of ancient marine organisms.",
    "Fireflies produce light through a chemical reaction in their abdomens.",
    "Kites were used for military signalling long before they became toys.",
    "Maple syrup is made by boiling down the sap collected in early spring.",
    "Thunder is the sound of air expanding rapidly after a lightning strike heats it.",
    "Hedgehogs roll into a tight ball of spines when they feel threatened by predators.",
    "Granite is an igneous rock that cools slowly underground, allowing large crystals to form.",
    "Rainbows appear when sunlight is refracted and reflected inside raindrops.",
    "Letterpress printing leaves a slight impression in thick, soft paper.",
    "Peat bogs accumulate partially decayed plant matter over thousands of years.",
    "Spiders spin silk that is, weight for weight, stronger than many kinds of steel wire.",
    "Crop rotation helps restore nutrients to soil and reduces the build-up of pests.",
    "Snowflakes form hexagonal crystals whose shapes depend on temperature and humidity.",
    "Aqueducts carried water across valleys using a gentle, constant downward gradient.",
    "Seahorses are fish in which the male carries the eggs until they hatch.",
    "Cobblestone streets were common before asphalt became cheap to produce.",
    "Olive trees can live for centuries and still bear fruit in dry climates.",
    "Quartz is a hard mineral found in many rocks, from sandstone to granite.",
    "Tortoises can survive long periods without food by slowing their metabolism.",
    "Weather vanes show the direction from which the wind is blowing at a given moment.",
    "Charcoal is produced by heating wood in the absence of air for many hours.",
    "Jellyfish have no brain, heart or bones, yet they have drifted through the oceans for millions of years.",
    "Marble is limestone transformed by heat and pressure deep within the earth.",
]

# Short background lines. Perturbed texts are short, and at low target ratios
# the tolerance window is narrower than any sentence of the main bank.
SHORT_NOISE = [
    "Owls hunt mostly at night.",
    "Basil grows well in warm, sunny spots.",
    "Copper turns green as it weathers.",
    "Most maps put north at the top.",
    "Kelp forests shelter many small fish.",
    "Slate splits into thin, flat sheets.",
    "Frogs absorb water through their skin.",
    "Wax melts at a fairly low temperature.",
    "Lichens can grow on bare rock.",
    "Hail forms inside tall storm clouds.",
    "Otters use stones to open shellfish.",
    "Linen is woven from flax fibres.",
]

MISC_SENTENCES = [
    "Its guests often arrive by ferry during the summer season.",
    "The couple later travelled widely across the northern provinces.",
    "The firm now exports its products to more than twenty countries.",
    "The club was formed by a group of dock workers.",
]


def sha256(s):
    return hashlib.sha256(s.encode("utf-8")).hexdigest()


def relation(a, b, desc):
    return {"keywords": [a, b], "description": desc}


def build():
    samples, phrases, rag = [], {}, {}

    for i, (fam, group, city, wrong, year) in enumerate(HOTELS):
        q = f"The {fam} family is part of a hotel company that has a head office in what city?"
        kws = [f"{fam} family", "hotel company"]
        coe = (f"The {fam} family is part of the {group}, a hotel company founded in {year}. "
               f"{MISC_SENTENCES[0]} The {group} has its head office in {city}.")
        samples.append(dict(id=f"syn-hotel-{i}", question=q, answer=city, coe=coe,
                            intent="City address Information", keywords=kws,
                            relations=[relation(kws[0], kws[1], f"The {fam} family is part of a hotel company.")]))
        phrases[city] = wrong
        phrases[kws[0]] = "business family"
        rag[q] = [
            f"Is the {fam} family part of a hotel company with a head office in a city? Readers ask this often.",
            f"A hotel company, a head office, a city: the {fam} family story as told by local guides.",
            f"Which city? The {fam} family and its hotel company head office remain a travel-forum favourite.",
            f"Head office trivia: the {fam} family is part of a hotel company, and the city question keeps coming up.",
            f"Notes on the {fam} family, the hotel company it is part of, and head office moves in the city.",
            f"The {fam} family hotel company: guests ask what city hosts the head office.",
        ]

    for i, (person, job, spouse, dem, country, wrong) in enumerate(SPOUSES):
        q = f"What nationality was {person}'s wife?"
        kws = [person, "wife"]
        coe = (f"{person} was a {job} whose wife was {spouse}. "
               f"{spouse} held {dem} nationality as a citizen of {country}. {MISC_SENTENCES[1]}")
        samples.append(dict(id=f"syn-spouse-{i}", question=q, answer=dem, coe=coe,
                            intent="Nationality of person", keywords=kws,
                            relations=[relation(person, "wife", f"{person} had a wife.")]))
        phrases[dem] = wrong
        phrases[person] = "the artist"
        rag[q] = [
            f"Questions about {person}'s wife and her nationality remain popular among biographers.",
            f"{person}, his wife, and the nationality debate: a short reading list.",
            f"What nationality was the wife of {person}? Archive visitors keep asking.",
            f"On {person}'s wife: letters, travels and the question of nationality.",
            f"Nationality records rarely mention {person} or his wife by name.",
            f"A profile of {person} that never settles his wife's nationality.",
        ]

    for i, (company, industry, founder, date, wrong) in enumerate(FOUNDERS):
        q = f"When was the founder of {company} born?"
        kws = ["founder", company]
        coe = (f"{company} is a {industry} firm whose founder was {founder}. "
               f"{MISC_SENTENCES[2]} {founder} was born on {date}.")
        samples.append(dict(id=f"syn-founder-{i}", question=q, answer=date, coe=coe,
                            intent="Birth date of person", keywords=kws,
                            relations=[relation("founder", company, f"The founder founded {company}.")]))
        phrases[date] = wrong
        phrases[company] = "the company"
        rag[q] = [
            f"The founder of {company}: where was he or she born and raised?",
            f"{company} history pages skip over the year its founder was born.",
            f"Who is the founder of {company}, and when were they born? A collector's guide.",
            f"Born to build: stories about the founder of {company}.",
            f"Visitors to {company} often ask about the founder and where the founder was born.",
            f"A timeline of {company} that starts after its founder was born.",
        ]

    for i, (team, stadium, city, pop, wrong) in enumerate(TEAMS):
        q = f"What is the population of the city where the {team} play their home games?"
        kws = [team, "home games"]
        coe = (f"The {team} play their home games at {stadium} in {city}. "
               f"{MISC_SENTENCES[3]} {city} has a population of {pop} according to the latest census.")
        samples.append(dict(id=f"syn-team-{i}", question=q, answer=pop, coe=coe,
                            intent="Population of city", keywords=kws,
                            relations=[relation(team, "home games", f"The {team} play their home games in a city.")]))
        phrases[pop] = wrong
        phrases[team] = "the sports club"
        rag[q] = [
            f"{team} fans debate which city hosts their home games and how population affects play.",
            f"Where do the {team} play their home games? City population figures are rarely quoted.",
            f"The {team} play their home games in a growing city; population estimates vary by source.",
            f"Home games, the city and its population: notes from a {team} season ticket holder.",
            f"City guides list where the {team} play home games but omit the population.",
            f"Population growth and the {team}: how a city shaped their home games.",
        ]

    phrases.update({"hotel company": "business organization", "wife": "family member",
                    "founder": "business person", "home games": "sporting fixtures"})
    return samples, phrases, rag


def check(samples, rag):
    for s in samples:
        banned = s["keywords"] + CUES[s["intent"]] + [s["answer"]]
        for n in NOISE_BANK + SHORT_NOISE:
            for b in banned:
                assert b.lower() not in n.lower(), (b, n)
        for w in rag[s["question"]]:
            for b in CUES[s["intent"]] + [s["answer"]]:
                assert b.lower() not in w.lower(), (b, w)
        assert len(set(rag[s["question"]])) == 6


def main():
    samples, phrases, rag = build()
    check(samples, rag)

    out = []
    for s in samples:
        out.append({
            "question": s["question"], "answer": s["answer"], "coe": s["coe"],
            "senp": None, "wordp": None,
            "features": {"intent": s["intent"], "keywords": s["keywords"], "relations": s["relations"]},
            "source": "synthetic", "seed_metadata": {"id": s["id"]},
        })
    with open(os.path.join(HERE, "samples.jsonl"), "w") as f:
        for rec in out:
            f.write(json.dumps(rec, ensure_ascii=False) + "\n")

    with open(os.path.join(HERE, "mock_rules.json"), "w") as f:
        json.dump({"intent_cues": CUES, "phrases": dict(sorted(phrases.items()))}, f, indent=2)
        f.write("\n")

    noise_dir = os.path.join(HERE, "fixtures", "noise")
    rag_dir = os.path.join(HERE, "fixtures", "rag")
    for d in (noise_dir, rag_dir):
        shutil.rmtree(d, ignore_errors=True)
        os.makedirs(d)

    # Ten background snippets per keyword query (seven long, three short),
    # drawn round-robin so pools overlap a little.
    cursor = 0
    short_cursor = 0
    for s in samples:
        for kw in s["keywords"]:
            query = f"Please introduce the background of the {kw}"
            path = os.path.join(noise_dir, sha256(query) + ".json")
            if os.path.exists(path):
                continue
            results = []
            for i in range(10):
                if i % 3 == 2:
                    text = SHORT_NOISE[short_cursor % len(SHORT_NOISE)]
                    short_cursor += 1
                    url = f"https://example.org/noise/short/{short_cursor}"
                else:
                    text = NOISE_BANK[cursor % len(NOISE_BANK)]
                    cursor += 1
                    url = f"https://example.org/noise/{cursor}"
                results.append({"title": text.split(" ")[0], "text": text, "url": url})
            with open(path, "w") as f:
                json.dump({"query": query, "results": results}, f, indent=2)
                f.write("\n")

    for q, texts in rag.items():
        results = [{"title": f"Result {i + 1}", "text": t, "url": f"https://example.org/web/{i + 1}"}
                   for i, t in enumerate(texts)]
        with open(os.path.join(rag_dir, sha256(q) + ".json"), "w") as f:
            json.dump({"query": q, "results": results}, f, indent=2)
            f.write("\n")


if __name__ == "__main__":
    main()
