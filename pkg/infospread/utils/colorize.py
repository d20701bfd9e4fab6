from colorama import Fore, Style


COLORS = {'red': Fore.RED, 'green': Fore.GREEN, 'blue': Fore.BLUE, 'cyan': Fore.CYAN, 
          'magenta': Fore.MAGENTA, 'yellow': Fore.YELLOW, 'white': Fore.WHITE}
VERDICT_COLORS = {'PASS': 'green', 'FAIL': 'red', 'INFEASIBLE': 'magenta', 'WARN': 'yellow'}


def color_str(string, color, bold=False):
    r"""Returns stylized string with coloring and bolding for printing.
    
    Example::
    
        >>> print(color_str('infospread', 'green', bold=True))
        
    Args:
        string (str): input string
        color (str): color name
        bold (bool, optional): if ``True``, then the string is bolded. Default: ``False``
    """
    style = COLORS[color]
    if bold:
        style += Style.BRIGHT
    return style + string + Style.RESET_ALL


def color_verdict(verdict):
    r"""Bold, colored rendering of a report verdict such as ``'PASS'`` or ``'INFEASIBLE'``. """
    return color_str(verdict, VERDICT_COLORS.get(verdict, 'white'), bold=True)
