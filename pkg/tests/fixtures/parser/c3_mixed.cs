using System.Text;
/* using System.Xml; */
using (var s = OpenStream()) { }
using Newtonsoft.Json;
