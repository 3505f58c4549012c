"""Literate rendering of template source as a single HTML page.

Comments between statements are prose; statements are code. A prose line
beginning with '#', '##' or '###' renders as a heading, blank lines split
paragraphs, and code spans keep their original formatting.
"""

from __future__ import annotations

import html

from . import ast
from .parser import parse_program

_STYLE = """
body { font-family: Georgia, serif; max-width: 46em; margin: 2em auto; padding: 0 1em; color: #222; }
h1, h2, h3 { font-family: Helvetica, Arial, sans-serif; }
pre.code { background: #eaf2fb; border-left: 3px solid #9db8d6; padding: 0.8em 1em;
           overflow-x: auto; font-size: 0.92em; line-height: 1.35; }
"""


def render_docs(source: str, title: str = "") -> str:
    program = parse_program(source)
    return render_chunks(program.doc_chunks, title)


def render_chunks(chunks: list[ast.DocChunk], title: str = "") -> str:
    body: list[str] = []
    if title:
        body.append(f"<h1>{html.escape(title)}</h1>")
    for chunk in chunks:
        if isinstance(chunk, ast.CodeSpan):
            body.append(f'<pre class="code">{html.escape(chunk.text)}</pre>')
        else:
            body.extend(_prose_blocks(chunk.text))
    head = (
        "<!doctype html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n"
        f"<title>{html.escape(title) or 'Component documentation'}</title>\n"
        f"<style>{_STYLE}</style>\n</head>\n<body>\n"
    )
    return head + "\n".join(body) + "\n</body>\n</html>\n"


def _prose_blocks(text: str) -> list[str]:
    blocks: list[str] = []
    paragraph: list[str] = []

    def flush() -> None:
        if paragraph:
            blocks.append("<p>" + html.escape(" ".join(paragraph)) + "</p>")
            paragraph.clear()

    for line in text.split("\n"):
        stripped = line.strip()
        if not stripped:
            flush()
            continue
        if stripped.startswith("#"):
            flush()
            level = min(len(stripped) - len(stripped.lstrip("#")), 3)
            heading = stripped.lstrip("#").strip()
            blocks.append(f"<h{level + 1}>{html.escape(heading)}</h{level + 1}>")
            continue
        paragraph.append(stripped)
    flush()
    return blocks
