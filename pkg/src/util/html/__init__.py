from util.html.html_report import HtmlReport
