# System imports
from datetime import datetime
from pathlib import Path
from typing import Any

import plotly.graph_objects as go
from jinja2 import Environment, FileSystemLoader, select_autoescape
from rsxml import Logger

from util.plotly.export_figure import export_figure


class HtmlReport:
    """Single-page HTML report built from Jinja2 templates and interactive Plotly figures.

    The page frame (`template.html` and `base.css`) lives next to this module;
    callers supply the body template and any extra CSS.
    """

    def __init__(
        self,
        report_name: str,
        report_type: str,
        report_dir: Path | str,
        body_template_path: Path | str | None = None,
        css_paths: list[Path | str] | None = None,
        report_version: str = "1.0",
    ):
        """
        Args:
            report_name (str): passed to the template as 'title'
            report_type (str): passed straight to the template
            report_dir (Path | str): where report.html is written
            body_template_path (Path | str, optional): Jinja2 template rendered into the page body
            css_paths (list, optional): stylesheets appended after base.css
            report_version (str): passed straight to the template
        """
        self.report_name = report_name
        self.report_type = report_type
        self.report_dir = Path(report_dir)
        self.figures: dict[str, go.Figure] = {}
        self.html_elements: dict[str, Any] = {}
        self.body_template_path = Path(body_template_path) if body_template_path else None
        self.css_paths = [Path(p) for p in css_paths] if css_paths else []
        self.report_version = report_version
        self._log = Logger("HtmlReport")
        self.report_dir.mkdir(parents=True, exist_ok=True)

    def add_figure(self, name: str, fig: go.Figure) -> None:
        self.figures[name] = fig

    def add_html_elements(self, key: str, el: Any) -> None:
        """Make `el` available to the body template under `key`"""
        self.html_elements[key] = el

    def render(self, suffix: str = "") -> Path:
        """Write report{suffix}.html and return its path"""
        figure_exports = {name: export_figure(fig, name) for name, fig in self.figures.items()}

        frame_dir = Path(__file__).parent / 'templates'
        css = (frame_dir / 'base.css').read_text(encoding='utf-8')
        for css_path in self.css_paths:
            if css_path.exists():
                css += "\n" + css_path.read_text(encoding='utf-8')
            else:
                self._log.warning(f"CSS path {css_path} does not exist and will be skipped.")

        report_context = {
            'report': {
                'head': f"<style>{css}</style>",
                'title': self.report_name,
                'date': datetime.now().strftime('%B %d, %Y - %I:%M%p'),
                'ReportType': self.report_type,
                'version': self.report_version,
            },
            'figures': figure_exports,
            **self.html_elements,
        }

        search_paths = [str(frame_dir)]
        if self.body_template_path and self.body_template_path.exists():
            search_paths.insert(0, str(self.body_template_path.parent))
        env = Environment(loader=FileSystemLoader(search_paths), autoescape=select_autoescape(['html']))

        body = ""
        if self.body_template_path:
            if self.body_template_path.exists():
                body = env.get_template(self.body_template_path.name).render(report_context)
            else:
                self._log.warning(f"Body template {self.body_template_path} not found; rendering an empty body")

        html = env.get_template('template.html').render(**report_context, body=body)
        out_path = self.report_dir / f"report{suffix}.html"
        out_path.write_text(html, encoding="utf-8")
        self._log.info(f"Report written to {out_path}")
        return out_path
