"""XML document tree and a small XPath evaluator.

Supported paths: child steps by name or ``*``, a terminal ``@attr``,
``text()`` or ``string()`` step, one ``[n]`` or ``[@attr='v']`` predicate
per element step, absolute (``/a/b``) and relative (``a/b``) forms.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import IO
from xml.parsers import expat

ELEMENT = "element"
ATTRIBUTE = "attribute"
TEXT = "text"


class MalformedXml(ValueError):
    def __init__(self, line: int, column: int, reason: str):
        super().__init__(f"malformed XML at {line}:{column}: {reason}")
        self.line = line
        self.column = column
        self.reason = reason


class PathSyntaxError(ValueError):
    def __init__(self, expr: str, position: int, reason: str):
        super().__init__(f"bad path {expr!r} at position {position}: {reason}")
        self.expr = expr
        self.position = position
        self.reason = reason


@dataclass(eq=False, slots=True)
class XmlNode:
    kind: str
    name: str | None = None
    value: str | None = None
    children: list[XmlNode] = field(default_factory=list)
    attributes: list[XmlNode] = field(default_factory=list)
    parent: XmlNode | None = field(default=None, repr=False)
    order: int = 0

    def attribute(self, name: str) -> str | None:
        for a in self.attributes:
            if a.name == name:
                return a.value
        return None

    @property
    def root(self) -> XmlNode:
        node = self
        while node.parent is not None:
            node = node.parent
        return node

    def elements(self, name: str | None = None) -> list[XmlNode]:
        return [c for c in self.children
                if c.kind == ELEMENT and (name is None or c.name == name)]

    def __repr__(self) -> str:
        if self.kind == ELEMENT:
            return f"<XmlNode element {self.name} ({len(self.children)} children)>"
        if self.kind == ATTRIBUTE:
            return f"<XmlNode @{self.name}={self.value!r}>"
        return f"<XmlNode text {self.value!r}>"


class _TreeBuilder:
    def __init__(self) -> None:
        self.root: XmlNode | None = None
        self.stack: list[XmlNode] = []
        self.text: list[str] = []
        self.counter = 0

    def _flush(self) -> None:
        if self.text and self.stack:
            parent = self.stack[-1]
            self.counter += 1
            parent.children.append(
                XmlNode(TEXT, value="".join(self.text), parent=parent, order=self.counter))
        self.text = []

    def start(self, name: str, attrs: list[str]) -> None:
        self._flush()
        parent = self.stack[-1] if self.stack else None
        self.counter += 1
        node = XmlNode(ELEMENT, name=name, parent=parent, order=self.counter)
        for i in range(0, len(attrs), 2):
            self.counter += 1
            node.attributes.append(
                XmlNode(ATTRIBUTE, name=attrs[i], value=attrs[i + 1], parent=node,
                        order=self.counter))
        if parent is None:
            self.root = node
        else:
            parent.children.append(node)
        self.stack.append(node)

    def end(self, name: str) -> None:
        self._flush()
        self.stack.pop()

    def data(self, text: str) -> None:
        if self.stack:
            self.text.append(text)


def parse_xml(source: bytes | str | IO) -> XmlNode:
    """Parse a well-formed document and return its root element."""
    builder = _TreeBuilder()
    parser = expat.ParserCreate()
    parser.ordered_attributes = True
    parser.buffer_text = True
    parser.StartElementHandler = builder.start
    parser.EndElementHandler = builder.end
    parser.CharacterDataHandler = builder.data
    try:
        if hasattr(source, "read"):
            parser.ParseFile(source)
        else:
            parser.Parse(source, True)
    except expat.ExpatError as exc:
        raise MalformedXml(exc.lineno, exc.offset + 1, expat.ErrorString(exc.code)) from None
    if builder.root is None:
        raise MalformedXml(1, 1, "no root element")
    return builder.root


# -- paths -------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Step:
    kind: str                   # "element", "attribute", "text", "string"
    name: str | None = None     # element name, "*" or attribute name
    position: int | None = None
    attr_test: tuple[str, str] | None = None

    def __str__(self) -> str:
        if self.kind == "attribute":
            return f"@{self.name}"
        if self.kind in ("text", "string"):
            return f"{self.kind}()"
        if self.position is not None:
            return f"{self.name}[{self.position}]"
        if self.attr_test is not None:
            return f"{self.name}[@{self.attr_test[0]}='{self.attr_test[1]}']"
        return self.name or ""


@dataclass(frozen=True, slots=True)
class PathExpr:
    absolute: bool
    steps: tuple[Step, ...]

    @property
    def selector(self) -> str:
        """Kind of value the path selects: element, attribute, text or string."""
        return self.steps[-1].kind

    def __str__(self) -> str:
        body = "/".join(str(s) for s in self.steps)
        return "/" + body if self.absolute else body


_NAME = r"[A-Za-z_][\w.\-]*(?::[A-Za-z_][\w.\-]*)?"
_STEP = re.compile(
    rf"""(?P<func>text|string)\(\)
       | @(?P<attr>{_NAME})
       | (?P<name>{_NAME}|\*)
         (?:\[\s*(?:(?P<pos>\d+)
                  |@(?P<pattr>{_NAME})\s*=\s*(?:'(?P<sq>[^']*)'|"(?P<dq>[^"]*)"))\s*\])?
    """, re.VERBOSE)


def compile_path(expr: str) -> PathExpr:
    pos = 0
    absolute = expr.startswith("/")
    if absolute:
        pos = 1
    steps: list[Step] = []
    while True:
        if expr.startswith("/", pos):
            raise PathSyntaxError(expr, pos + 1, "descendant axis is not supported")
        m = _STEP.match(expr, pos)
        if m is None:
            raise PathSyntaxError(expr, pos + 1, "expected a step")
        if steps and steps[-1].kind != "element":
            raise PathSyntaxError(expr, pos + 1, f"no step may follow {steps[-1]}")
        if m.group("func"):
            steps.append(Step(m.group("func")))
        elif m.group("attr"):
            steps.append(Step("attribute", m.group("attr")))
        else:
            position = int(m.group("pos")) if m.group("pos") else None
            if position == 0:
                raise PathSyntaxError(expr, m.start("pos") + 1, "positions start at 1")
            attr_test = None
            if m.group("pattr"):
                value = m.group("sq") if m.group("sq") is not None else m.group("dq")
                attr_test = (m.group("pattr"), value)
            steps.append(Step("element", m.group("name"), position, attr_test))
        pos = m.end()
        if pos == len(expr):
            break
        if expr[pos] != "/":
            raise PathSyntaxError(expr, pos + 1, f"unexpected {expr[pos]!r}")
        pos += 1
    if absolute and steps[0].kind != "element":
        raise PathSyntaxError(expr, 2, "absolute path must start with an element step")
    return PathExpr(absolute, tuple(steps))


def _as_path(path: PathExpr | str) -> PathExpr:
    return compile_path(path) if isinstance(path, str) else path


def eval_xpath(context: XmlNode, path: PathExpr | str) -> list[XmlNode]:
    """Evaluate ``path`` and return matching nodes in document order."""
    path = _as_path(path)
    steps = path.steps
    if path.absolute:
        root = context.root
        first = steps[0]
        nodes = [root] if _filter([root], first) else []
        steps = steps[1:]
    else:
        nodes = [context]
    for step in steps:
        if not nodes:
            break
        if step.kind == "element":
            out: list[XmlNode] = []
            for n in nodes:
                out.extend(_filter([c for c in n.children if c.kind == ELEMENT], step))
            nodes = out
        elif step.kind == "attribute":
            nodes = [a for n in nodes for a in n.attributes if a.name == step.name]
        elif step.kind == "text":
            nodes = [c for n in nodes for c in n.children if c.kind == TEXT]
        # string() keeps the current node set; values are taken via node_string
    return nodes


def _filter(candidates: list[XmlNode], step: Step) -> list[XmlNode]:
    if step.name != "*":
        candidates = [c for c in candidates if c.name == step.name]
    if step.position is not None:
        return candidates[step.position - 1:step.position]
    if step.attr_test is not None:
        key, value = step.attr_test
        return [c for c in candidates if c.attribute(key) == value]
    return candidates


def node_text(n: XmlNode) -> list[str]:
    return [c.value for c in n.children if c.kind == TEXT]


def node_string(n: XmlNode) -> str:
    if n.kind != ELEMENT:
        return n.value or ""
    parts: list[str] = []
    stack = [n]
    while stack:
        node = stack.pop()
        if node.kind == TEXT:
            parts.append(node.value)
        else:
            stack.extend(reversed(node.children))
    return "".join(parts)


def select_values(context: XmlNode, path: PathExpr | str) -> list[str]:
    """String values selected by a reference path.

    ``text()`` yields one value per direct text node, ``@attr`` one per
    attribute, and element or ``string()`` paths one string value per
    matched element.
    """
    path = _as_path(path)
    nodes = eval_xpath(context, path)
    if path.selector in ("text", "attribute"):
        return [n.value for n in nodes]
    return [node_string(n) for n in nodes]
