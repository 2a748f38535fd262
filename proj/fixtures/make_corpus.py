#!/usr/bin/env python3
"""Generate the offline wiki fixture corpus under fixtures/corpus/.

Output is deterministic; rerun after editing ARTICLES and commit the result.
The home page padding constants pin the ids the golden replays depend on:
the search box renders as [331] on a fresh session and the first search
result link as [1459].
"""

import html
import json
import pathlib

ORIGIN = "http://kiwix.local"
CONTENT = "wikipedia_en_all_maxi_2022-05"
HOME = ORIGIN + "/"
MAIN = f"{ORIGIN}/{CONTENT}/"
ARTICLE_BASE = f"{ORIGIN}/{CONTENT}/A/"

# Head elements before the toolbar; each contributes 2 DOM nodes.
HOME_HEAD_PADDING = 155
# Catalog rows after the toolbar; each contributes 6 DOM nodes.
HOME_CATALOG_ROWS = 172
# Trailing comments for the final adjustment; 2 DOM nodes each.
HOME_TRAILING_COMMENTS = 5

OUT = pathlib.Path(__file__).resolve().parent / "corpus"


def esc(text):
    return html.escape(text, quote=True)


def toolbar():
    random_url = f"{ORIGIN}/random?content={CONTENT}"
    return (
        '<div id="kiwixtoolbar" class="ui-widget-header">\n'
        '<div class="kiwix_centered">\n'
        '<form class="kiwixsearch" method="GET" action="/search" id="kiwixsearchform">'
        f'<input type="hidden" name="content" value="{CONTENT}">'
        '<input type="search" name="pattern" autocomplete="off" '
        'aria-label="Search &#39;Wikipedia&#39;">\n'
        '<input type="checkbox" id="kiwix_button_show_toggle">\n'
        '<label for="kiwix_button_show_toggle"> </label>\n'
        '<div class="kiwix_button_cont">\n'
        f'<a id="kiwix_serve_taskbar_library_button" title="Go to welcome page" href="{HOME}"></a>\n'
        f'<a id="kiwix_serve_taskbar_home_button" title="Go to the main page of &#39;Wikipedia&#39;" '
        f'href="{MAIN}"></a>'
        '<button aria-label="Wikipedia"></button>'
        f'<a id="kiwix_serve_taskbar_random_button" title="Go to a randomly selected page" '
        f'href="{random_url}"></a>\n'
        "</div>\n</form>\n</div>\n</div>\n"
    )


def home_page():
    head = [
        "<!DOCTYPE html>",
        "<html>",
        "<head>",
        '<meta charset="utf-8">',
        "<title>Welcome to Kiwix Server</title>",
    ]
    for i in range(HOME_HEAD_PADDING):
        head.append(f'<link rel="preload" href="/skin/i18n/chunk-{i:03d}.json" as="fetch">')
    head.append("</head>")
    body = ["<body>", toolbar().rstrip("\n"), '<div class="kiwixHomeBody">']
    body.append('<h1>Welcome to Kiwix Server</h1>')
    body.append(f'<p>Library: <a href="{MAIN}">Wikipedia</a></p>')
    body.append('<div class="book__list">')
    for i in range(HOME_CATALOG_ROWS):
        body.append(
            f'<div class="book" hidden><span class="book__title">Catalog entry {i + 1}</span>'
            f'<span class="book__lang">eng</span></div>'
        )
    body.append("</div>")
    body.append("</div>")
    for i in range(HOME_TRAILING_COMMENTS):
        body.append(f"<!-- catalog shard {i} -->")
    body.append("</body>")
    body.append("</html>")
    return "\n".join(head + body) + "\n"


def article_page(title, paragraphs):
    parts = [
        "<!DOCTYPE html>",
        "<html>",
        "<head>",
        '<meta charset="utf-8">',
        f"<title>{esc(title)}</title>",
        '<link rel="stylesheet" href="../-/s/style.css">',
        "</head>",
        '<body class="mediawiki">',
        toolbar().rstrip("\n"),
        '<div id="content" class="mw-body">',
        f'<h1 class="firstHeading">{esc(title)}</h1>',
        '<div id="mw-content-text">',
    ]
    parts.extend(paragraphs)
    parts.append("</div>")
    parts.append("</div>")
    parts.append("</body>")
    parts.append("</html>")
    return "\n".join(parts) + "\n"


def slug(title):
    return title.replace(" ", "_")


def link(title, text=None):
    return f'<a href="{esc(slug(title))}">{esc(text or title)}</a>'


ARTICLES = {
    "Princes in the Tower": [
        "<p>The Princes in the Tower were "
        + link("Edward V of England", "Edward V")
        + ", King of England, and "
        + link("Richard of Shrewsbury, Duke of York")
        + ".</p>",
        "<p>These two brothers were the only sons of King "
        + link("Edward IV of England", "Edward IV")
        + " and "
        + link("Elizabeth Woodville")
        + " surviving at the time of their father's death in 1483.</p>",
        "<p>When they were 12 and 9 years old they were lodged in the "
        + link("Tower of London")
        + " by their uncle, who was acting as Lord Protector. He took the throne as "
        + link("Richard III of England", "Richard III")
        + " later that year. The boys were not seen in public after the summer of 1483.</p>",
        "<p>Their disappearance remains one of the best known mysteries of the "
        + link("Wars of the Roses")
        + ". Bones found in the tower in 1674 were placed in an urn at Westminster Abbey.</p>",
    ],
    "Edward IV of England": [
        "<p>Edward IV (1442 to 1483) was King of England from 1461 to 1470 and again from 1471 until "
        "his death. He was a central figure of the " + link("Wars of the Roses") + " and the first "
        "king from the " + link("House of York") + ".</p>",
        "<p>He married " + link("Elizabeth Woodville") + " in secret in 1464. Their sons were the "
        + link("Princes in the Tower") + ".</p>",
    ],
    "Edward V of England": [
        "<p>Edward V (1470 to about 1483) was the elder son of "
        + link("Edward IV of England", "Edward IV")
        + ". He reigned for a few weeks in 1483 and was never crowned. He was one of the "
        + link("Princes in the Tower") + ".</p>",
    ],
    "Richard of Shrewsbury, Duke of York": [
        "<p>Richard of Shrewsbury (1473 to about 1483) was the second son of "
        + link("Edward IV of England", "Edward IV") + " and " + link("Elizabeth Woodville")
        + ". He disappeared in the " + link("Tower of London") + " with his brother.</p>",
    ],
    "Elizabeth Woodville": [
        "<p>Elizabeth Woodville (about 1437 to 1492) was Queen of England as the wife of "
        + link("Edward IV of England", "Edward IV") + ". She was the mother of the "
        + link("Princes in the Tower") + " and of " + link("Elizabeth of York") + ".</p>",
    ],
    "Elizabeth of York": [
        "<p>Elizabeth of York (1466 to 1503) was the eldest daughter of "
        + link("Edward IV of England", "Edward IV") + ". She married "
        + link("Henry VII of England", "Henry VII") + " in 1486, uniting the rival houses.</p>",
    ],
    "Richard III of England": [
        "<p>Richard III (1452 to 1485) was King of England from 1483 until his death at the "
        + link("Battle of Bosworth Field") + ". He was the last king of the " + link("House of York")
        + ".</p>",
    ],
    "Henry VII of England": [
        "<p>Henry VII (1457 to 1509) took the throne after the " + link("Battle of Bosworth Field")
        + " and founded the Tudor dynasty. He married " + link("Elizabeth of York") + ".</p>",
    ],
    "Battle of Bosworth Field": [
        "<p>The Battle of Bosworth Field was fought on 22 August 1485. It was the last significant "
        "battle of the " + link("Wars of the Roses") + ", and " + link("Richard III of England", "Richard III")
        + " was killed in the fighting.</p>",
    ],
    "Wars of the Roses": [
        "<p>The Wars of the Roses were a series of civil wars fought over control of the English "
        "throne in the fifteenth century, between the " + link("House of York") + " and the House of "
        "Lancaster.</p>",
    ],
    "House of York": [
        "<p>The House of York was a branch of the English royal house. Three of its members became "
        "kings of " + link("England") + ": " + link("Edward IV of England", "Edward IV") + ", "
        + link("Edward V of England", "Edward V") + " and " + link("Richard III of England", "Richard III")
        + ".</p>",
    ],
    "Tower of London": [
        "<p>The Tower of London is a historic castle on the north bank of the River Thames in central "
        + link("London") + ". It has served as a royal residence, a prison and a treasury.</p>",
    ],
    "London": [
        "<p>London is the capital and largest city of " + link("England") + " and the United Kingdom. "
        "It stands on the River Thames in the south east of the island of Great Britain.</p>",
    ],
    "England": [
        "<p>England is a country that is part of the United Kingdom. Its capital is " + link("London")
        + ". The kingdom of England existed as a sovereign state until 1707.</p>",
    ],
    "Skin Yard": [
        "<p>Skin Yard was an American " + link("Grunge", "grunge") + " band from "
        + link("Seattle") + ", Washington, who were active from 1985 to 1992. The group never gained "
        "a mainstream audience, but were an influence on several of their grunge contemporaries, "
        "including " + link("Soundgarden") + ".</p>",
        "<p>Origin: Seattle, Washington, U.S. Genres: grunge, alternative metal. Years active: "
        "1985 to 1992. Members included " + link("Jack Endino") + " and Ben McMillan.</p>",
    ],
    "Ostava": [
        "<p>Ostava is an " + link("Alternative rock", "alternative rock") + " band from "
        + link("Bulgaria") + ". It was formed in 1991, and released a long-playing record in 2000.</p>",
        "<p>Origin: " + link("Gabrovo") + ", Bulgaria. Genres: alternative rock. Years active: 1991 "
        "to present.</p>",
    ],
    "Bulgaria": [
        "<p>Bulgaria is a country in Southeast Europe. Its capital and largest city is Sofia. Other "
        "cities include Plovdiv, Varna and " + link("Gabrovo") + ".</p>",
    ],
    "Gabrovo": [
        "<p>Gabrovo is a city in central northern " + link("Bulgaria") + ", at the foot of the "
        "Balkan Mountains. It is known for its museum of humour.</p>",
    ],
    "Seattle": [
        "<p>Seattle is a seaport city on the west coast of the " + link("United States")
        + ". It is the seat of King County, Washington, and the largest city in the state. It was "
        "the centre of the " + link("Grunge", "grunge") + " movement.</p>",
    ],
    "United States": [
        "<p>The United States of America is a country primarily located in North America. It is "
        "made up of 50 states, among them Washington, whose largest city is " + link("Seattle")
        + ".</p>",
    ],
    "Grunge": [
        "<p>Grunge is a genre of " + link("Alternative rock", "alternative rock") + " that emerged "
        "in the mid 1980s in the American state of Washington, particularly in " + link("Seattle")
        + ". Early groups included " + link("Skin Yard") + " and " + link("Soundgarden") + ".</p>",
    ],
    "Alternative rock": [
        "<p>Alternative rock is a category of rock music that emerged from the independent music "
        "underground of the 1970s and became widely popular in the 1990s. Subgenres include "
        + link("Grunge", "grunge") + ".</p>",
    ],
    "Soundgarden": [
        "<p>Soundgarden was an American rock band formed in " + link("Seattle") + " in 1984. It was "
        "one of the pioneers of " + link("Grunge", "grunge") + ".</p>",
    ],
    "Jack Endino": [
        "<p>Jack Endino is an American record producer and musician from " + link("Seattle")
        + ". He was the guitarist of " + link("Skin Yard") + ".</p>",
    ],
    "Shin Yokohama Prince Hotel": [
        "<p>The Shin Yokohama Prince Hotel is a skyscraper in the " + link("Kohoku-ku")
        + " ward of " + link("Yokohama") + ", " + link("Japan") + ". Completed in March 1992, it "
        "stands at 149.4m (490 ft) tall.</p>",
    ],
    "Yokohama": [
        "<p>Yokohama is the second largest city in " + link("Japan") + " by population. It lies on "
        "Tokyo Bay, south of Tokyo. Its wards include " + link("Kohoku-ku") + ".</p>",
    ],
    "Kohoku-ku": [
        "<p>Kohoku-ku is one of the 18 wards of the city of " + link("Yokohama") + " in "
        + link("Japan") + ". It is home to the " + link("Shin Yokohama Prince Hotel") + ".</p>",
    ],
    "Japan": [
        "<p>Japan is an island country in East Asia. Its capital is Tokyo and its second largest "
        "city is " + link("Yokohama") + ".</p>",
    ],
    "Prince (musician)": [
        "<p>Prince Rogers Nelson, known as Prince, was an American singer, songwriter and "
        "multi-instrumentalist. He was born in 1958 in the " + link("United States") + ".</p>",
    ],
    "The Little Prince": [
        "<p>The Little Prince is a novella written and illustrated by Antoine de Saint-Exupery, "
        "first published in 1943. It is one of the best selling books in the world.</p>",
    ],
}


def main_page():
    items = "".join(f"<li>{link('A/' + slug(t), t)}</li>" for t in sorted(ARTICLES))
    return article_page("Wikipedia", [
        "<p>Welcome to Wikipedia, the free encyclopedia that anyone can edit.</p>",
        f"<ul>{items}</ul>",
    ]).replace('href="A/', f'href="{ARTICLE_BASE}')


def main():
    pages_dir = OUT / "pages"
    pages_dir.mkdir(parents=True, exist_ok=True)
    for old in pages_dir.glob("*.html"):
        old.unlink()
    manifest = {"home_url": HOME, "content": CONTENT, "pages": {}}

    def emit(url, name, text):
        (pages_dir / name).write_text(text, encoding="utf-8")
        manifest["pages"][url] = f"pages/{name}"

    emit(HOME, "_home.html", home_page())
    emit(MAIN, "_main.html", main_page())
    for title, paragraphs in ARTICLES.items():
        name = slug(title).replace(",", "").replace("(", "").replace(")", "") + ".html"
        emit(ARTICLE_BASE + slug(title), name, article_page(title, paragraphs))

    manifest["pages"] = dict(sorted(manifest["pages"].items()))
    (OUT / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {len(manifest['pages'])} pages to {OUT}")


if __name__ == "__main__":
    main()
