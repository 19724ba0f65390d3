#!/usr/bin/env python3
"""Regenerates the test fixtures. Output is committed; rerun after edits."""

import html
import os
import random
import shutil

HERE = os.path.dirname(os.path.abspath(__file__))
HOST = "news.example.test"

FILLER = ("the a of to and in on for with that this was is as by at from it has have were "
          "its their which but also after over into more than about will would could").split()

GENERAL = ("people week year report statement officials group plans country region city "
           "company local national public recent major time number part day months").split()

TOPICS = {
    "sport": {
        "words": ("match goal striker midfielder league season coach stadium tournament championship "
                  "referee penalty fans squad transfer defender goalkeeper trophy derby fixture "
                  "victory defeat injury manager club playoff semifinal athletes relay sprint").split(),
        "phrases": ["premier league", "penalty kick", "extra time", "world cup", "transfer window"],
    },
    "science and technology": {
        "words": ("researchers software algorithm laboratory processor quantum experiment satellite "
                  "physics neural network data chip engineers telescope genome robot battery "
                  "semiconductor prototype encryption startup computing silicon sensor orbit").split(),
        "phrases": ["machine learning", "data quality", "open source", "quantum computer", "space agency"],
    },
    "economy, business and finance": {
        "words": ("market shares investors inflation bank earnings revenue profit stocks bonds "
                  "interest rates economy quarter growth exports merger acquisition dividend "
                  "retailers currency deficit budget forecast analysts trading").split(),
        "phrases": ["central bank", "interest rate", "stock market", "quarterly earnings", "supply chain"],
    },
    "health": {
        "words": ("patients hospital doctors vaccine clinical treatment disease nurses symptoms "
                  "therapy infection surgery diagnosis medicine pharmacy virus diabetes cancer "
                  "epidemic wellbeing nutrition clinic immunity dosage outbreak").split(),
        "phrases": ["clinical trial", "public health", "health service", "blood pressure", "mental health"],
    },
    "weather": {
        "words": ("storm rainfall temperatures forecast snow wind flooding heatwave drought "
                  "thunderstorms humidity frost hurricane meteorologists gusts showers fog "
                  "celsius cyclone hail blizzard warnings coastline monsoon").split(),
        "phrases": ["weather warning", "heavy rain", "cold front", "high pressure", "met office"],
    },
    "food and drink": {
        "words": ("recipe chef restaurant menu wine cheese bakery flavour ingredients kitchen "
                  "dessert coffee harvest vineyard tasting dishes spices pastry brewery cuisine "
                  "seasonal olive tomatoes chocolate sourdough").split(),
        "phrases": ["olive oil", "tasting menu", "street food", "farmers market", "natural wine"],
    },
}
TOPIC_NAMES = list(TOPICS)

FIRST = "Anna Ben Clara David Elena Farid Grace Hugo Ines Jonas Kira Liam Maya Nils Olga Pavel".split()
LAST = "Bishop Carter Duarte Engel Fischer Garcia Horvat Ivanova Jensen Kowalski Lindqvist Moreau".split()


def sentence(rng, topic, length=None):
    spec = TOPICS[topic]
    n = length or rng.randint(12, 20)
    words = []
    while len(words) < n:
        r = rng.random()
        if r < 0.33:
            words.append(rng.choice(FILLER))
        elif r < 0.78:
            words.append(rng.choice(spec["words"]))
        elif r < 0.88:
            words.extend(rng.choice(spec["phrases"]).split())
        else:
            words.append(rng.choice(GENERAL))
    s = " ".join(words)
    return s[0].upper() + s[1:] + "."


def paragraph(rng, topic, sentences=None):
    return " ".join(sentence(rng, topic) for _ in range(sentences or rng.randint(3, 5)))


def headline(rng, topic):
    spec = TOPICS[topic]
    w = [rng.choice(spec["words"]), rng.choice(FILLER), rng.choice(spec["phrases"]), rng.choice(spec["words"])]
    s = " ".join(w)
    return s[0].upper() + s[1:]


def short_label(rng):
    return rng.choice(["News", "World", "Business", "Sport", "Tech", "Health", "Weather", "Food", "Opinion",
                       "Video", "Live", "Culture", "Travel", "Money", "Science", "Local", "Podcasts"])


def person(rng):
    return rng.choice(FIRST) + " " + rng.choice(LAST)


def slugify(text):
    return "-".join(text.lower().split())


def esc(text):
    return html.escape(text, quote=True)


def article_body(rng, topic, paragraphs):
    """Returns (html, gold_lines)."""
    out, gold = [], []
    for i in range(paragraphs):
        if i > 0 and i % 3 == 0:
            sub = headline(rng, topic)
            out.append(f"<h2>{esc(sub)}</h2>")
            gold.append(sub)
        p = paragraph(rng, topic)
        words = p.split(" ")
        if len(words) > 10 and rng.random() < 0.4:
            k = rng.randint(3, len(words) - 4)
            linked = " ".join(words[k:k + 2])
            before = " ".join(words[:k])
            after = " ".join(words[k + 2:])
            out.append(f'<p>{esc(before)} <a href="/tag/{slugify(linked)}">{esc(linked)}</a> {esc(after)}</p>')
        else:
            out.append(f"<p>{esc(p)}</p>")
        gold.append(p)
    return "\n".join(out), gold


def head(title, extra=""):
    return (f"<!DOCTYPE html>\n<html lang=\"en\"><head><meta charset=\"utf-8\"><title>{esc(title)}</title>"
            f"<link rel=\"stylesheet\" href=\"/s.css\"><script>var cfg={{ads:true,track:'x'}};</script>{extra}"
            "</head>\n")


def menu(rng, n, cls="menu"):
    items = "".join(f'<li><a href="/section/{i}">{esc(short_label(rng))}</a></li>' for i in range(n))
    return f'<ul class="{cls}">{items}</ul>'


def layout_nav_heavy(rng, topic, title, body):
    author = person(rng)
    return (head(title) + "<body>\n"
            f'<div id="topbar"><div class="logo"><a href="/"><img src="/logo.png" alt="Example"></a></div>'
            f"{menu(rng, 30)}</div>\n"
            f'<div id="subnav">{menu(rng, 12, "submenu")}</div>\n'
            '<div class="breadcrumbs"><a href="/">Home</a> &raquo; <a href="/news">News</a></div>\n'
            f'<div id="main"><div class="article"><h1>{esc(title)}</h1>'
            f'<div class="byline">By <a href="/author/{slugify(author)}">{esc(author)}</a></div>\n'
            f'<div class="body">\n{body}\n</div></div></div>\n'
            f'<div id="bottomnav">{menu(rng, 20, "footer-links")}</div>\n'
            '<div class="copyright">Copyright 2024 Example Media Group. All rights reserved. '
            "Reproduction in whole or in part without written permission is prohibited.</div>\n"
            "</body></html>\n")


def layout_comment_heavy(rng, topic, title, body):
    author = person(rng)
    comments = []
    for _ in range(rng.randint(12, 25)):
        who = person(rng)
        text = " ".join(sentence(rng, topic, rng.randint(8, 30)) for _ in range(rng.randint(1, 2)))
        comments.append(
            f'<div class="comment"><div class="meta"><span class="user">{esc(who)}</span>'
            f'<span class="when">{rng.randint(2, 23)} hours ago</span></div>'
            f"<p>{esc(text)}</p>"
            '<div class="actions"><a href="#r">Reply</a><a href="#f">Report</a></div></div>')
    return (head(title) + "<body>\n"
            f"<header><div class=\"logo\">Example Daily</div><nav>{menu(rng, 10)}</nav></header>\n"
            f'<article><h1>{esc(title)}</h1>'
            f'<p class="byline">{esc(author)}</p>\n{body}\n</article>\n'
            f'<section id="comments"><h3>{len(comments)} comments</h3>\n' + "\n".join(comments) +
            "\n</section>\n"
            "<footer><p>Example Daily is published by Example Media Group. Terms and privacy policy apply.</p>"
            "</footer>\n</body></html>\n")


def layout_multi_column(rng, topic, title, body):
    author = person(rng)
    most_read = "".join(f'<li><a href="/story/{i}">{esc(headline(rng, rng.choice(TOPIC_NAMES)))}</a></li>'
                        for i in range(5))
    teasers = []
    for i in range(6):
        other = rng.choice(TOPIC_NAMES)
        teasers.append(f'<div class="teaser"><img src="/thumb/{i}.jpg" width="120" height="80">'
                       f'<h4><a href="/story/t{i}">{esc(headline(rng, other))}</a></h4>'
                       f"<p>{esc(sentence(rng, other, 14))}</p></div>")
    return (head(title) + "<body>\n"
            f"<div class=\"masthead\"><div class=\"brand\">The Example Post</div>{menu(rng, 8)}</div>\n"
            '<div class="wrap">\n'
            f'<div class="col-left"><div class="promo"><h4>Most read</h4><ol>{most_read}</ol></div></div>\n'
            '<div class="col-main"><div class="article-header"><div class="kicker">'
            f'<a href="/topic">{esc(short_label(rng))}</a></div><h1>{esc(title)}</h1>'
            f'<div class="meta"><span class="author">{esc(author)}</span></div></div>\n'
            f'<div class="story">\n{body}\n</div></div>\n'
            '<div class="col-right"><div class="related"><h3>Related</h3>' + "".join(teasers) +
            "</div></div>\n</div>\n"
            '<div class="site-footer"><ul class="links"><li><a href="/about">About</a></li>'
            '<li><a href="/contact">Contact</a></li></ul></div>\n</body></html>\n')


LAYOUTS = [("nav", layout_nav_heavy), ("comments", layout_comment_heavy), ("columns", layout_multi_column)]


def write(path, text):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


def gold_pages(rng):
    root = os.path.join(HERE, "pages")
    shutil.rmtree(root, ignore_errors=True)
    for i in range(24):
        name, layout = LAYOUTS[i % len(LAYOUTS)]
        topic = TOPIC_NAMES[i % len(TOPIC_NAMES)]
        title = headline(rng, topic)
        body, gold = article_body(rng, topic, rng.randint(5, 10))
        stem = f"{i:02d}_{name}"
        write(os.path.join(root, stem + ".html"), layout(rng, topic, title, body))
        write(os.path.join(root, stem + ".gold.txt"), "\n".join(gold) + "\n")


AUTHOR_PATTERNS = ["author", "authors", "people", "user", "users", "editor", "editors"]


def site_article(rng, topic, idx, image_mode, author_mode):
    title = headline(rng, topic)
    body, gold = article_body(rng, topic, rng.randint(7, 10))
    author = person(rng)
    slug = slugify(title)
    meta = f'<meta name="author" content="{esc(author)}">' if author_mode == "meta" else ""
    if author_mode == "meta":
        # The meta tag has to win over this profile link.
        other = person(rng)
        byline = f'<div class="byline">Edited by <a href="/author/{slugify(other)}">{esc(other)}</a></div>'
    else:
        byline = (f'<div class="byline">By <a href="/{author_mode}/{rng.randint(100, 999)}">profile</a>'
                  f' <a href="/{author_mode}/{slugify(author)}">{esc(author)}</a></div>')
    figure = ""
    if image_mode == "large":
        figure = (f'<figure><img src="/img/{slug}-hero.jpg" width="1200" height="675" alt="">'
                  "<figcaption>Photo: Example Agency</figcaption></figure>")
    elif image_mode == "small":
        figure = f'<figure><img src="/img/{slug}-thumb.jpg" width="150" height="100" alt=""></figure>'
    page = (head(title, meta) + "<body>\n"
            f'<header><img src="/logo.png" width="180" height="60" alt="Example"><nav>{menu(rng, 9)}</nav></header>\n'
            f'<main><article><h1>{esc(title)}</h1>{byline}{figure}\n{body}\n</article></main>\n'
            '<img src="https://tracker.example.test/p.gif" width="1" height="1">\n'
            "<footer><p>Example News Network. All rights reserved worldwide.</p></footer>\n"
            "</body></html>\n")
    return {
        "title": title,
        "path": f"/2024/03/{slug}.html",
        "page": page,
        "excerpt": gold[0][:160].rsplit(" ", 1)[0] + " ...",
        "author": author,
        "author_mode": author_mode,
        "topic": topic,
        "text": "\n".join(gold),
    }


def rfc822(day, hour):
    dow = ["Fri", "Sat", "Sun", "Mon", "Tue", "Wed", "Thu"][(day - 1) % 7]
    return f"{dow}, {day:02d} Mar 2024 {hour:02d}:00:00 GMT"


def rss(title, items_xml, extra_ns=""):
    return ('<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<rss version="2.0"{extra_ns}>\n<channel>\n<title>{esc(title)}</title>\n'
            f"<link>http://{HOST}/</link>\n<description>Fixture feed</description>\n"
            + items_xml + "</channel>\n</rss>\n")


def degraded_item(a, day):
    return ("<item>\n"
            f"  <title>{esc(a['title'])}</title>\n"
            f"  <link>http://{HOST}{a['path']}</link>\n"
            f"  <description>{esc(a['excerpt'])}</description>\n"
            f"  <pubDate>{rfc822(day, 9)}</pubDate>\n"
            "</item>\n")


def site(rng):
    root = os.path.join(HERE, "site")
    shutil.rmtree(root, ignore_errors=True)
    articles = []
    for i in range(12):
        topic = TOPIC_NAMES[i % len(TOPIC_NAMES)]
        image_mode = ["large", "small", "none"][i % 3]
        author_mode = "meta" if i % 4 == 0 else AUTHOR_PATTERNS[i % len(AUTHOR_PATTERNS)]
        a = site_article(rng, topic, i, image_mode, author_mode)
        articles.append(a)
        write(os.path.join(root, HOST, a["path"].lstrip("/")), a["page"])
    manifest = ["# path\ttopic\tauthor_source\tauthor"]
    manifest += [f"{a['path']}\t{a['topic']}\t{a['author_mode']}\t{a['author']}" for a in articles]
    write(os.path.join(HERE, "site_manifest.tsv"), "\n".join(manifest) + "\n")

    feeds = os.path.join(HERE, "feeds")
    shutil.rmtree(feeds, ignore_errors=True)
    write(os.path.join(feeds, "degraded.xml"),
          rss("Example News (degraded)", "".join(degraded_item(a, i + 1) for i, a in enumerate(articles))))

    dead = "".join(degraded_item(a, i + 1) for i, a in enumerate(articles[:9]))
    dead += degraded_item({"title": "Withdrawn story", "path": "/2024/03/withdrawn-story.html",
                           "excerpt": "This story is no longer available."}, 10)
    write(os.path.join(feeds, "deadlink.xml"), rss("Example News (one dead link)", dead))

    complete = []
    for i, a in enumerate(articles[:4]):
        paras = "".join(f"<p>{esc(line)}</p>" for line in a["text"].split("\n"))
        kws = ", ".join(TOPICS[a["topic"]]["phrases"][:3])
        complete.append(
            "<item>\n"
            f"  <title>{esc(a['title'])}</title>\n"
            f"  <link>http://{HOST}{a['path']}</link>\n"
            f"  <description>{esc(a['excerpt'])}</description>\n"
            f"  <content:encoded><![CDATA[{paras}]]></content:encoded>\n"
            f"  <dc:creator>{esc(a['author'])}</dc:creator>\n"
            f"  <pubDate>{rfc822(i + 1, 7)}</pubDate>\n"
            f"  <category>{esc(a['topic'])}</category>\n"
            f'  <media:thumbnail url="http://{HOST}/img/original-{i}.jpg" width="800" height="600"/>\n'
            f"  <media:keywords>{esc(kws)}</media:keywords>\n"
            "</item>\n")
    ns = (' xmlns:content="http://purl.org/rss/1.0/modules/content/"'
          ' xmlns:dc="http://purl.org/dc/elements/1.1/" xmlns:media="http://search.yahoo.com/mrss/"')
    write(os.path.join(feeds, "complete.xml"), rss("Example News (complete)", "".join(complete), ns))

    wild = rss("Wild &amp; Woolly <Feed>", (
        "<item>\n  <title><![CDATA[Fish & Chips <b>prices</b> rise]]></title>\n"
        "  <guid>http://news.example.test/2024/03/fish.html</guid>\n"
        "  <description>&lt;p&gt;Prices at the &lt;em&gt;seaside&lt;/em&gt; caf&#233;s rose.&lt;/p&gt;</description>\n"
        "  <author>editor@example.test (Olga Moreau)</author>\n"
        "  <pubDate>Sat, 2 Mar 2024 10:15:00 +0100</pubDate>\n"
        "  <category>food and drink</category><category>economy</category>\n"
        '  <enclosure url="/img/fish.jpg" type="image/jpeg" length="12345"/>\n'
        "  <unknown:thing xmlns:unknown=\"urn:x\">ignored</unknown:thing>\n"
        "</item>\n"
        "<item>\n  <title>Relative link resolved against the channel</title>\n"
        "  <link>/2024/03/relative.html</link>\n"
        "  <dc:date>2024-03-03T08:00:00Z</dc:date>\n"
        "</item>\n"
        "<item>\n  <title>Unicode: über naïve 日本語 – dash</title>\n"
        "  <link>http://news.example.test/2024/03/unicode.html</link>\n"
        "  <description>Grüße aus München</description>\n"
        "</item>\n"), ' xmlns:dc="http://purl.org/dc/elements/1.1/"')
    write(os.path.join(feeds, "wild.xml"), wild)
    write(os.path.join(feeds, "empty.xml"), rss("Empty", ""))
    return articles


def corpus(rng):
    lines = []
    for topic in TOPIC_NAMES:
        for _ in range(40):
            lines.append(f"{topic}\t{paragraph(rng, topic, rng.randint(3, 6))}")
    rng.shuffle(lines)
    write(os.path.join(HERE, "train.tsv"), "\n".join(lines) + "\n")


def stock_table():
    lines = ["# keyword\turl\twidth\theight"]
    for t, spec in TOPICS.items():
        for w in spec["words"]:
            lines.append(f"{w}\thttps://stock.example.test/{slugify(t).replace(',', '')}/{w}.jpg\t1280\t853")
        for p in spec["phrases"]:
            lines.append(f"{p}\thttps://stock.example.test/phrase/{slugify(p)}.jpg\t1600\t900")
    write(os.path.join(HERE, "stock.tsv"), "\n".join(lines) + "\n")


def main():
    rng = random.Random(20240301)
    gold_pages(rng)
    site(rng)
    corpus(rng)
    stock_table()


if __name__ == "__main__":
    main()
