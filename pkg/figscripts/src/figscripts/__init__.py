"""Figure regeneration from ionoptics CSV exports."""

from .render import (
    FigureRecipe,
    RenderError,
    SeriesStyle,
    build_figure,
    default_recipes,
    load_table,
    main,
    render,
)

__all__ = [
    "FigureRecipe",
    "RenderError",
    "SeriesStyle",
    "build_figure",
    "default_recipes",
    "load_table",
    "main",
    "render",
]
