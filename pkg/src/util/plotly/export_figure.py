import plotly.graph_objects as go
import plotly.io as pio

from rsxml import Logger


def export_figure(fig: go.Figure, name: str, include_plotlyjs: bool | str = False) -> str:
    """Interactive HTML fragment for a plotly figure.

    plotly.js itself is loaded once by the page template, so by default it is
    left out of every fragment.
    """
    log = Logger('Export fig')
    log.debug(f'Generating interactive fig name {name}')
    return pio.to_html(
        fig,
        include_plotlyjs=include_plotlyjs,
        full_html=False,
        div_id=f"fig-{name}",
        config={"displayModeBar": True},
    )
